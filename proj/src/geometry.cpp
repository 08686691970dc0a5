#include "fracflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fracflow/fft.hpp"

namespace fracflow {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(std::size_t m) { return m != 0 && (m & (m - 1)) == 0; }

double weight(std::size_t k, std::size_t m) { return (k == 0 || 2 * k == m) ? 1.0 : 2.0; }

}  // namespace

FractionalOrder::FractionalOrder(double s) : s_(s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw std::invalid_argument("fractional order must lie in the open interval (0,1), got " +
                                std::to_string(s));
  }
}

// ---------------------------------------------------------------------------
// RadialCurve

RadialCurve::RadialCurve(std::vector<double> samples, Vec2 center)
    : samples_(std::move(samples)), center_(center) {
  const std::size_t m = samples_.size();
  if (m < 16 || !is_power_of_two(m)) {
    throw std::invalid_argument("radial curve needs a power-of-two node count >= 16, got " +
                                std::to_string(m));
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double f = samples_[i];
    if (!std::isfinite(f) || f <= 0.0) {
      throw std::invalid_argument("radial sample " + std::to_string(i) +
                                  " is not a positive finite number");
    }
  }
  if (!std::isfinite(center_.x) || !std::isfinite(center_.y)) {
    throw std::invalid_argument("radial curve centre must be finite");
  }
  spectrum_ = fft::forward(samples_);
}

RadialCurve RadialCurve::from_function(std::size_t m, const std::function<double(double)>& f,
                                       Vec2 center) {
  std::vector<double> s(m);
  for (std::size_t i = 0; i < m; ++i) s[i] = f(kTwoPi * static_cast<double>(i) / static_cast<double>(m));
  return RadialCurve(std::move(s), center);
}

RadialCurve RadialCurve::circle(std::size_t m, double radius, Vec2 center) {
  return RadialCurve(std::vector<double>(m, radius), center);
}

RadialCurve RadialCurve::ellipse(std::size_t m, double a, double b, Vec2 center) {
  return from_function(
      m,
      [a, b](double t) {
        const double c = std::cos(t), s = std::sin(t);
        return a * b / std::sqrt(b * b * c * c + a * a * s * s);
      },
      center);
}

double RadialCurve::spacing() const noexcept { return kTwoPi / static_cast<double>(size()); }

double RadialCurve::theta(std::size_t i) const noexcept {
  return kTwoPi * static_cast<double>(i) / static_cast<double>(size());
}

RadialJet RadialCurve::evaluate(double theta) const {
  const std::size_t m = size();
  const std::complex<double> step = std::polar(1.0, theta);
  std::complex<double> z = 1.0;
  RadialJet jet;
  for (std::size_t k = 0; k <= m / 2; ++k) {
    const double w = weight(k, m);
    const std::complex<double> term = spectrum_[k] * z;
    const double kk = static_cast<double>(k);
    jet.f += w * term.real();
    jet.df -= w * kk * term.imag();
    jet.d2f -= w * kk * kk * term.real();
    z *= step;
  }
  return jet;
}

Vec2 RadialCurve::point(double theta) const {
  const double f = evaluate(theta).f;
  return center_ + f * Vec2{std::cos(theta), std::sin(theta)};
}

Vec2 RadialCurve::chord(std::size_t i, double delta) const {
  const std::size_t m = size();
  const double ti = theta(i);
  const double mid = ti + 0.5 * delta;
  // f(ti + delta) - f(ti) = sum_k w_k Re(c_k e^{ik mid} (2i sin(k delta/2)))
  const std::complex<double> step = std::polar(1.0, mid);
  std::complex<double> z = 1.0;
  double df = 0.0;
  for (std::size_t k = 1; k <= m / 2; ++k) {
    z *= step;
    const double kk = static_cast<double>(k);
    df -= weight(k, m) * 2.0 * std::sin(0.5 * kk * delta) * (spectrum_[k] * z).imag();
  }
  const double half = std::sin(0.5 * delta);
  const Vec2 domega{-2.0 * std::sin(mid) * half, 2.0 * std::cos(mid) * half};
  const Vec2 omega{std::cos(ti + delta), std::sin(ti + delta)};
  return df * omega + samples_[i] * domega;
}

double RadialCurve::min_radius() const { return *std::min_element(samples_.begin(), samples_.end()); }
double RadialCurve::max_radius() const { return *std::max_element(samples_.begin(), samples_.end()); }

RadialCurve RadialCurve::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("scale factor must be positive");
  std::vector<double> s(samples_);
  for (double& v : s) v *= lambda;
  return RadialCurve(std::move(s), lambda * center_);
}

RadialCurve RadialCurve::translated(Vec2 shift) const { return RadialCurve(samples_, center_ + shift); }

RadialCurve RadialCurve::rotated(double alpha) const {
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const Vec2 c{ca * center_.x - sa * center_.y, sa * center_.x + ca * center_.y};
  std::vector<double> s(size());
  for (std::size_t i = 0; i < size(); ++i) s[i] = evaluate(theta(i) - alpha).f;
  return RadialCurve(std::move(s), c);
}

RadialCurve RadialCurve::rolled(std::size_t k) const {
  const std::size_t m = size();
  std::vector<double> s(m);
  for (std::size_t i = 0; i < m; ++i) s[(i + k) % m] = samples_[i];
  const double alpha = kTwoPi * static_cast<double>(k % m) / static_cast<double>(m);
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  return RadialCurve(std::move(s), {ca * center_.x - sa * center_.y, sa * center_.x + ca * center_.y});
}

// ---------------------------------------------------------------------------
// GraphCurve

namespace {

boost::math::interpolators::cardinal_cubic_b_spline<double> make_spline(
    const std::vector<double>& u, double half_width, double h, double left, double right) {
  return {u.data(), u.size(), -half_width, h, left, right};
}

std::vector<double> validated_heights(std::vector<double> u, double half_width) {
  if (u.size() < 16) {
    throw std::invalid_argument("graph curve needs at least 16 nodes, got " + std::to_string(u.size()));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw std::invalid_argument("graph half-width must be positive and finite");
  }
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (!std::isfinite(u[j])) {
      throw std::invalid_argument("graph height " + std::to_string(j) + " is not finite");
    }
  }
  return u;
}

}  // namespace

GraphCurve::GraphCurve(std::vector<double> heights, double half_width)
    : heights_(validated_heights(std::move(heights), half_width)),
      half_width_(half_width),
      spacing_(2.0 * half_width / static_cast<double>(heights_.size() - 1)),
      left_slope_((heights_[1] - heights_[0]) / spacing_),
      right_slope_((heights_[heights_.size() - 1] - heights_[heights_.size() - 2]) / spacing_),
      spline_(make_spline(heights_, half_width_, spacing_, left_slope_, right_slope_)) {}

GraphCurve GraphCurve::from_function(std::size_t n, double half_width,
                                     const std::function<double(double)>& u) {
  std::vector<double> v(n);
  const double h = 2.0 * half_width / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) v[j] = u(-half_width + h * static_cast<double>(j));
  return GraphCurve(std::move(v), half_width);
}

double GraphCurve::x(std::size_t j) const noexcept {
  return -half_width_ + spacing_ * static_cast<double>(j);
}

double GraphCurve::height(double xx) const {
  if (xx <= -half_width_) return heights_.front() + left_slope_ * (xx + half_width_);
  if (xx >= half_width_) return heights_.back() + right_slope_ * (xx - half_width_);
  return spline_(xx);
}

double GraphCurve::slope(double xx) const {
  if (xx <= -half_width_) return left_slope_;
  if (xx >= half_width_) return right_slope_;
  return spline_.prime(xx);
}

double GraphCurve::second_derivative(double xx) const {
  if (xx < -half_width_ || xx > half_width_) return 0.0;
  return spline_.double_prime(xx);
}

Vec2 GraphCurve::chord(std::size_t j, double d) const {
  const std::size_t n = size();
  const double h = spacing_;
  const double xj = x(j);
  if (std::abs(d) <= h) {
    const bool right = d >= 0.0;
    const bool outside = (right && j + 1 == n) || (!right && j == 0);
    if (outside) return {d, (right ? right_slope_ : left_slope_) * d};
    // The spline is a single cubic on the adjacent knot interval.
    const double xn = right ? x(j + 1) : x(j - 1);
    const double u2 = spline_.double_prime(xj);
    const double u2n = spline_.double_prime(xn);
    const double u3 = (right ? (u2n - u2) : (u2 - u2n)) / h;
    const double u1 = spline_.prime(xj);
    return {d, d * (u1 + d * (0.5 * u2 + d * u3 / 6.0))};
  }
  return {d, height(xj + d) - heights_[j]};
}

std::size_t node_count(const Shape& shape) noexcept {
  return std::visit([](const auto& c) { return c.size(); }, shape);
}

// ---------------------------------------------------------------------------
// Differentiation and boundary points

std::vector<double> spectral_derivative(std::span<const double> samples, int order) {
  const std::size_t m = samples.size();
  auto c = fft::forward(samples);
  for (std::size_t k = 0; k <= m / 2; ++k) {
    const double kk = static_cast<double>(k);
    std::complex<double> factor = 1.0;
    for (int p = 0; p < order; ++p) factor *= std::complex<double>(0.0, kk);
    if (2 * k == m && order % 2 == 1) factor = 0.0;
    c[k] *= factor;
  }
  return fft::inverse(c, m);
}

std::vector<double> spectral_derivative(const RadialCurve& curve, int order) {
  return spectral_derivative(curve.samples(), order);
}

std::vector<BoundaryPoint> boundary_points(const RadialCurve& curve) {
  const std::size_t m = curve.size();
  const auto df = spectral_derivative(curve, 1);
  const auto f = curve.samples();
  std::vector<BoundaryPoint> pts(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = curve.theta(i);
    const Vec2 omega{std::cos(t), std::sin(t)};
    const Vec2 omega_perp = perp(omega);
    const double speed = std::hypot(f[i], df[i]);
    pts[i].position = curve.center() + f[i] * omega;
    pts[i].normal = (1.0 / speed) * (f[i] * omega - df[i] * omega_perp);
    pts[i].tangent = (1.0 / speed) * (df[i] * omega + f[i] * omega_perp);
    pts[i].arc_element = speed * curve.spacing();
  }
  return pts;
}

std::vector<BoundaryPoint> boundary_points(const GraphCurve& curve) {
  const std::size_t n = curve.size();
  const auto u = curve.heights();
  const double h = curve.spacing();
  std::vector<BoundaryPoint> pts(n);
  for (std::size_t j = 0; j < n; ++j) {
    double du;
    if (j == 0) {
      du = (u[1] - u[0]) / h;
    } else if (j + 1 == n) {
      du = (u[n - 1] - u[n - 2]) / h;
    } else {
      du = (u[j + 1] - u[j - 1]) / (2.0 * h);
    }
    const double speed = std::sqrt(1.0 + du * du);
    pts[j].position = {curve.x(j), u[j]};
    pts[j].normal = {-du / speed, 1.0 / speed};
    pts[j].tangent = {1.0 / speed, du / speed};
    pts[j].arc_element = speed * h;
  }
  return pts;
}

std::vector<BoundaryPoint> boundary_points(const Shape& shape) {
  return std::visit([](const auto& c) { return boundary_points(c); }, shape);
}

std::vector<double> local_curvature(const Shape& shape) {
  if (const auto* r = std::get_if<RadialCurve>(&shape)) {
    const auto f = r->samples();
    const auto d1 = spectral_derivative(*r, 1);
    const auto d2 = spectral_derivative(*r, 2);
    std::vector<double> k(r->size());
    for (std::size_t i = 0; i < k.size(); ++i) {
      const double g = f[i] * f[i] + d1[i] * d1[i];
      k[i] = (f[i] * f[i] + 2.0 * d1[i] * d1[i] - f[i] * d2[i]) / (g * std::sqrt(g));
    }
    return k;
  }
  const auto& g = std::get<GraphCurve>(shape);
  std::vector<double> k(g.size());
  for (std::size_t j = 0; j < k.size(); ++j) {
    const double du = g.slope(g.x(j));
    const double q = 1.0 + du * du;
    // graph sign convention: concave-down (bump cap) has positive curvature
    k[j] = -g.second_derivative(g.x(j)) / (q * std::sqrt(q));
  }
  return k;
}

}  // namespace fracflow
