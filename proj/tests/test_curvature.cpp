#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "fracflow/curvature.hpp"
#include "fracflow/errors.hpp"

using namespace fracflow;
using std::numbers::pi;

namespace {

// Unit-disk curvature in closed form.
double varpi_closed(double s) {
  return std::pow(2.0, 1.0 - s) * (1.0 - s) * std::sqrt(pi) * std::tgamma((1.0 - s) / 2.0) / std::tgamma(1.0 - s / 2.0);
}

RadialCurve flower3(std::size_t m) {
  return RadialCurve::from_function(m, [](double t) { return 1.0 + 0.3 * std::cos(3 * t); });
}

GraphCurve bump(std::size_t n) {
  return GraphCurve::from_function(n, 10.0, [](double x) { return std::exp(-x * x); });
}

}  // namespace

TEST_CASE("closed-form disk curvature at s = 1/2") { CHECK(varpi_closed(0.5) == doctest::Approx(3.70814935460274)); }

TEST_CASE("varpi from the area integral equals the closed form") {
  for (double s : {0.25, 0.5, 0.75}) {
    CAPTURE(s);
    CHECK(varpi(FractionalOrder(s)) == doctest::Approx(varpi_closed(s)).epsilon(1e-10));
  }
}

TEST_CASE("circles: both routes give varpi R^-s") {
  const FractionalOrder s(0.5);
  for (double R : {0.5, 2.0}) {
    const Shape c = RadialCurve::circle(128, R, {0.4, -1.0});
    const double expect = varpi_closed(0.5) * std::pow(R, -0.5);
    CHECK(hs_boundary(c, 7, s) == doctest::Approx(expect).epsilon(1e-10));
    CHECK(hs_oracle(c, 7, s) == doctest::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("boundary and oracle routes agree on non-circular shapes") {
  const FractionalOrder s(0.5);
  const Shape e = RadialCurve::ellipse(128, 2.0, 1.0);
  const Shape f = flower3(128);
  for (std::size_t i : {0u, 9u, 32u, 50u}) {
    CAPTURE(i);
    CHECK(hs_boundary(e, i, s) == doctest::Approx(hs_oracle(e, i, s)).epsilon(1e-8));
    CHECK(hs_boundary(f, i, s) == doctest::Approx(hs_oracle(f, i, s)).epsilon(1e-8));
  }
}

TEST_CASE("graphs: flat and linear graphs have zero curvature, the bump cap is positive") {
  const FractionalOrder s(0.5);
  const Shape flat = GraphCurve(std::vector<double>(65, 0.0), 5.0);
  const Shape line = GraphCurve::from_function(65, 5.0, [](double x) { return 0.7 * x - 0.2; });
  for (std::size_t j : {0u, 20u, 32u, 64u}) {
    CHECK(std::abs(hs_boundary(flat, j, s)) < 1e-12);
    CHECK(std::abs(hs_boundary(line, j, s)) < 1e-9);
  }
  CHECK(std::abs(hs_oracle(line, 32, s)) < 1e-8);
  const Shape b = bump(257);
  const double h = hs_boundary(b, 128, s);
  CHECK(h > 0.0);
  CHECK(h == doctest::Approx(hs_oracle(b, 128, s)).epsilon(3e-3));
  // off the apex the gap is discretization error and shrinks under refinement
  const Shape fine = bump(513);
  const double coarse_err = std::abs(hs_boundary(b, 150, s) - hs_oracle(b, 150, s));
  const double fine_err = std::abs(hs_boundary(fine, 300, s) - hs_oracle(fine, 300, s));
  CHECK(coarse_err < 1e-3);
  CHECK(fine_err < coarse_err / 4.0);
}

TEST_CASE("complement flips the sign") {
  const FractionalOrder s(0.25);
  const Shape e = RadialCurve::ellipse(64, 1.5, 1.0);
  CHECK(hs_oracle(e, 5, s, {}, Side::complement) == doctest::Approx(-hs_oracle(e, 5, s)).epsilon(1e-9));
}

TEST_CASE("scaling, translation and rotation") {
  const FractionalOrder s(0.75);
  const auto f = flower3(128);
  const double h = hs_boundary(f, 11, s);
  CHECK(hs_boundary(f.scaled(2.0), 11, s) == doctest::Approx(std::pow(2.0, -0.75) * h).epsilon(1e-10));
  CHECK(hs_boundary(f.translated({3.0, -1.0}), 11, s) == doctest::Approx(h).epsilon(1e-12));
  CHECK(hs_boundary(f.rolled(16), 27, s) == doctest::Approx(h).epsilon(1e-12));
}

TEST_CASE("hs_field does not depend on the worker count") {
  const FractionalOrder s(0.5);
  const Shape f = flower3(64);
  const auto a = hs_field(f, s, {}, 1);
  const auto b = hs_field(f, s, {}, 3);
  CHECK(a.values == b.values);
  CHECK(a.min <= a.max);
}

TEST_CASE("quadrature settings validation") {
  QuadratureSpec q;
  q.cylinder_radius = -1.0;
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
  q = {};
  q.abs_tol = 0.0;
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("under-resolved radial samples are refused") {
  std::vector<double> f(32, 1.0);
  for (std::size_t i = 0; i < f.size(); i += 2) f[i] = 1.2;  // energy at the Nyquist mode
  CHECK_THROWS_AS(hs_boundary(RadialCurve(f), 0, FractionalOrder(0.5)), NonConvergent);
}

TEST_CASE("tangential gradient") {
  const FractionalOrder s(0.5);
  SUBCASE("vanishes on circles") {
    const auto g = tangential_gradient_hs(RadialCurve::circle(64, 1.0), 3, s);
    CHECK(std::abs(g.divergence_form) < 1e-10);
    CHECK(std::abs(g.direct_form) < 1e-7);
  }
  SUBCASE("both forms agree on an ellipse") {
    const auto g = tangential_gradient_hs(RadialCurve::ellipse(128, 2.0, 1.0), 10, s);
    CHECK(g.divergence_form == doctest::Approx(g.direct_form).epsilon(1e-8));
  }
  SUBCASE("matches the arc-length derivative of the field") {
    const auto c = RadialCurve::ellipse(128, 1.5, 1.0);
    const auto field = hs_field(c, s);
    const auto dh = spectral_derivative(std::span<const double>(field.values), 1);
    const auto grad = tangential_gradient_field(c, s);
    const auto pts = boundary_points(c);
    for (std::size_t i = 0; i < c.size(); i += 9) {
      const double speed = pts[i].arc_element / c.spacing();
      CHECK(grad[i] == doctest::Approx(dh[i] / speed).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("s-perimeter of the unit disk against a nested area quadrature") {
  for (double sv : {0.25, 0.5}) {
    CAPTURE(sv);
    // int_{|x|<1} int_{|y|>1} |x-y|^{-2-s}: the outer ray integral is rho^{-s}/s,
    // rho = distance from x to the circle along direction phi.
    using boost::math::quadrature::gauss_kronrod;
    boost::math::quadrature::tanh_sinh<double> ts;
    auto inner = [&](double r) {
      auto g = [&](double phi) {
        const double rho = (1 - r * r) / (r * std::cos(phi) + std::sqrt(1 - r * r * std::sin(phi) * std::sin(phi)));
        return std::pow(rho, -sv);
      };
      return 2.0 / sv * gauss_kronrod<double, 61>::integrate(g, 0.0, pi, 15, 1e-12);
    };
    const double brute = 2 * pi * ts.integrate([&](double r) { return r * inner(r); }, 0.0, 1.0);
    CHECK(s_perimeter_unnormalized(RadialCurve::circle(256, 1.0), FractionalOrder(sv)) ==
          doctest::Approx(brute).epsilon(1e-6));
  }
}

TEST_CASE("perimeter normalization equals s(1-s)") {
  for (double sv : {0.25, 0.5, 0.75}) {
    const FractionalOrder s(sv);
    CHECK(perimeter_normalization(s) == doctest::Approx(s.normalization()).epsilon(1e-8));
  }
  const FractionalOrder s(0.5);
  const double p1 = s_perimeter(RadialCurve::circle(128, 1.0), s);
  CHECK(s_perimeter(RadialCurve::circle(128, 2.0), s) == doctest::Approx(std::pow(2.0, 1.5) * p1).epsilon(1e-10));
}

TEST_CASE("curvature evolution identity on circles") {
  for (double sv : {0.25, 0.5, 0.75}) {
    CAPTURE(sv);
    const FractionalOrder s(sv);
    const double R = 1.3;
    const auto c = RadialCurve::circle(128, R);
    const auto field = hs_field(c, s);
    const double w = varpi_closed(sv);
    CHECK(f5_rhs(c, field, 4, s) == doctest::Approx(sv * w * w * std::pow(R, -2 * sv - 1)).epsilon(1e-6));
  }
}
