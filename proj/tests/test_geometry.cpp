#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "fracflow/fft.hpp"
#include "fracflow/geometry.hpp"
#include "fracflow/singular_quadrature.hpp"

using namespace fracflow;
using std::numbers::pi;

TEST_CASE("fractional order lives in the open unit interval") {
  CHECK_THROWS_AS(FractionalOrder(0.0), std::invalid_argument);
  CHECK_THROWS_AS(FractionalOrder(1.0), std::invalid_argument);
  CHECK_THROWS_AS(FractionalOrder(std::nan("")), std::invalid_argument);
  CHECK(FractionalOrder(0.5).normalization() == doctest::Approx(0.25));
}

TEST_CASE("radial curve construction guards") {
  CHECK_THROWS_AS(RadialCurve(std::vector<double>(12, 1.0)), std::invalid_argument);
  std::vector<double> f(16, 1.0);
  f[3] = -0.1;
  CHECK_THROWS_AS(RadialCurve{f}, std::invalid_argument);
  CHECK_THROWS_AS(GraphCurve(std::vector<double>(8, 0.0), 1.0), std::invalid_argument);
}

TEST_CASE("fft round trip") {
  std::vector<double> x(32);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.3 * i * i) + 0.1 * i;
  const auto c = fft::forward(x);
  REQUIRE(c.size() == 17);
  const auto y = fft::inverse(c, x.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-13));
}

TEST_CASE("circle boundary points") {
  const double R = 1.7;
  const auto c = RadialCurve::circle(64, R, {0.3, -0.2});
  const auto pts = boundary_points(c);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double t = c.theta(i);
    CHECK(pts[i].normal.x == doctest::Approx(std::cos(t)).epsilon(1e-13));
    CHECK(pts[i].normal.y == doctest::Approx(std::sin(t)).epsilon(1e-13));
    CHECK(pts[i].arc_element == doctest::Approx(2 * pi * R / 64).epsilon(1e-13));
  }
  for (double k : local_curvature(c)) CHECK(k == doctest::Approx(1.0 / R).epsilon(1e-12));
}

TEST_CASE("ellipse normals match the implicit gradient") {
  const double a = 2.0, b = 1.0;
  const auto e = RadialCurve::ellipse(128, a, b);
  for (const auto& p : boundary_points(e)) {
    Vec2 g{p.position.x / (a * a), p.position.y / (b * b)};
    const double n = std::hypot(g.x, g.y);
    CHECK(p.normal.x == doctest::Approx(g.x / n).epsilon(1e-12));
    CHECK(p.normal.y == doctest::Approx(g.y / n).epsilon(1e-12));
    CHECK(p.position.x * p.position.x / (a * a) + p.position.y * p.position.y / (b * b) ==
          doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("spectral derivative of a trigonometric polynomial") {
  const auto c = RadialCurve::from_function(64, [](double t) { return 1.0 + 0.3 * std::cos(3 * t); });
  const auto d1 = spectral_derivative(c, 1);
  const auto d2 = spectral_derivative(c, 2);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double t = c.theta(i);
    CHECK(d1[i] == doctest::Approx(-0.9 * std::sin(3 * t)).epsilon(1e-12).scale(1.0));
    CHECK(d2[i] == doctest::Approx(-2.7 * std::cos(3 * t)).epsilon(1e-12).scale(1.0));
  }
  const auto j = c.evaluate(0.123);
  CHECK(j.f == doctest::Approx(1.0 + 0.3 * std::cos(0.369)));
  CHECK(j.df == doctest::Approx(-0.9 * std::sin(0.369)));
}

TEST_CASE("rigid motions of radial curves") {
  const auto c = RadialCurve::from_function(64, [](double t) { return 1.0 + 0.2 * std::cos(2 * t); });
  const auto r = c.rolled(8);
  const auto q = c.rotated(2 * pi * 8 / 64);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(r.samples()[i] == doctest::Approx(q.samples()[i]).epsilon(1e-12));
  const auto s = c.scaled(2.0);
  CHECK(s.max_radius() == doctest::Approx(2.4));
  CHECK(c.translated({1, 2}).center().y == 2.0);
}

TEST_CASE("chord avoids cancellation for tiny offsets") {
  const auto c = RadialCurve::ellipse(64, 1.5, 1.0);
  const double d = 1e-9;
  const Vec2 ch = c.chord(5, d);
  const auto pts = boundary_points(c);
  const Vec2 tangent_step = (d * pts[5].arc_element / c.spacing()) * pts[5].tangent;
  CHECK(ch.x == doctest::Approx(tangent_step.x).epsilon(1e-7));
  CHECK(ch.y == doctest::Approx(tangent_step.y).epsilon(1e-7));
}

TEST_CASE("linear graph extends linearly") {
  const auto g = GraphCurve::from_function(33, 4.0, [](double x) { return 0.5 * x + 1.0; });
  CHECK(g.spacing() == doctest::Approx(0.25));
  CHECK(g.height(1.3) == doctest::Approx(1.65));
  CHECK(g.height(10.0) == doctest::Approx(6.0));
  CHECK(g.height(-10.0) == doctest::Approx(-4.0));
  CHECK(g.slope(2.1) == doctest::Approx(0.5));
  CHECK(g.left_slope() == doctest::Approx(0.5));
  for (double k : local_curvature(g)) CHECK(k == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("periodic kernel coefficients against direct quadrature") {
  // For p < 1 the kernel is integrable and the coefficients are ordinary integrals.
  const double p = 0.5;
  const auto c = periodic_kernel_coefficients(p, 4);
  boost::math::quadrature::tanh_sinh<double> ts;
  for (int k = 0; k <= 4; ++k) {
    const double direct =
        2.0 * ts.integrate([&](double phi) { return std::pow(2 * std::sin(phi / 2), -p) * std::cos(k * phi); }, 0.0, pi);
    CHECK(c[k] == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("periodic weights integrate trigonometric polynomials exactly") {
  const std::size_t m = 32;
  const double p = 0.5;
  const auto w = periodic_singular_weights(m, p);
  const auto c = periodic_kernel_coefficients(p, m);
  // g = cos(3 theta): integral against the kernel centred at theta_0 = 0 is c_3.
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) acc += (*w)[j] * std::cos(3 * 2 * pi * j / m);
  CHECK(acc == doctest::Approx(c[3]).epsilon(1e-12));
  CHECK(periodic_singular_weights(m, p) == w);  // cached
}

TEST_CASE("graph weights reproduce finite-part moments") {
  // f.p. int_0^{n-1} |t - i|^{-p} dt for an interior i, p = 2.5:
  // both sides contribute -(d^{1-p}) / (p - 1) with d the distance to the end.
  const std::size_t n = 21, i = 10;
  const double p = 2.5;
  const auto w = graph_singular_weights(n, p);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += (*w)[i * n + j];
  const double exact = 2.0 * (-std::pow(10.0, 1.0 - p) / (p - 1.0));
  CHECK(acc == doctest::Approx(exact).epsilon(1e-10));
}
