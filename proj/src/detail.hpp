#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "fracflow/geometry.hpp"

namespace fracflow::detail {

// int_t^inf (tau^2 + a^2)^{-p/2} dtau, t >= 0, p > 1.
inline double kernel_tail(double a, double t, double p) {
  a = std::abs(a);
  if (a == 0.0 || a < 1e-9 * t) return std::pow(t, 1.0 - p) / (p - 1.0);
  const double r = t / a;
  const double y = 1.0 / (1.0 + r * r);
  return 0.5 * std::pow(a, 1.0 - p) * boost::math::beta(0.5 * (p - 1.0), 0.5, y);
}

// int_{u1}^{u2} (u^2 + a^2)^{-p/2} du for u1 <= u2.
inline double kernel_segment(double a, double u1, double u2, double p) {
  if (u2 <= u1) return 0.0;
  if (u1 >= 0.0) return kernel_tail(a, u1, p) - kernel_tail(a, u2, p);
  if (u2 <= 0.0) return kernel_tail(a, -u2, p) - kernel_tail(a, -u1, p);
  const double whole = kernel_tail(a, 0.0, p);
  return (whole - kernel_tail(a, -u1, p)) + (whole - kernel_tail(a, u2, p));
}

// int_{u1}^{u2} u (u^2 + a^2)^{-p/2} du, p != 2.
inline double kernel_first_moment(double a, double u1, double u2, double p) {
  const double e = 1.0 - 0.5 * p;
  return (std::pow(u2 * u2 + a * a, e) - std::pow(u1 * u1 + a * a, e)) / (2.0 - p);
}

// int_{u1}^{u2} (c0 + c1 u + c2 u^2) (u^2 + a^2)^{-p/2} du
inline double kernel_quadratic(double a, double u1, double u2, double p, double c0, double c1, double c2) {
  double v = 0.0;
  if (c0 != 0.0 || c2 != 0.0) v += (c0 - c2 * a * a) * kernel_segment(a, u1, u2, p);
  if (c1 != 0.0) v += c1 * kernel_first_moment(a, u1, u2, p);
  if (c2 != 0.0) v += c2 * kernel_segment(a, u1, u2, p - 2.0);
  return v;
}

// Position and parameter derivatives of a radial curve at its nodes.
struct RadialFrame {
  std::vector<Vec2> x, dx, ddx, n;  // n = dx turned clockwise: outward, |n| = |dx|
  std::vector<double> speed;

  explicit RadialFrame(const RadialCurve& curve) {
    const std::size_t m = curve.size();
    const auto f = curve.samples();
    const auto d1 = spectral_derivative(curve, 1);
    const auto d2 = spectral_derivative(curve, 2);
    x.resize(m);
    dx.resize(m);
    ddx.resize(m);
    n.resize(m);
    speed.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double t = curve.theta(i);
      const Vec2 w{std::cos(t), std::sin(t)};
      const Vec2 wp = perp(w);
      x[i] = curve.center() + f[i] * w;
      dx[i] = d1[i] * w + f[i] * wp;
      ddx[i] = (d2[i] - f[i]) * w + 2.0 * d1[i] * wp;
      n[i] = {dx[i].y, -dx[i].x};
      speed[i] = norm(dx[i]);
    }
  }
};

// 4 sin^2(delta/2) for the node offset j - i on an M-point grid.
inline double chord_factor(std::size_t offset, std::size_t m) {
  const double h = std::sin(std::numbers::pi * static_cast<double>(offset) / static_cast<double>(m));
  return 4.0 * h * h;
}

}  // namespace fracflow::detail
