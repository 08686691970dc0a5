#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "detail.hpp"
#include "fracflow/curvature.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/singular_quadrature.hpp"

namespace fracflow {

// Interaction energy through the double boundary integral
//   (1/s^2) int int nu(x).nu(y) |x-y|^{-s} dsigma dsigma.
double s_perimeter_unnormalized(const RadialCurve& curve, FractionalOrder s) {
  const double sv = s.value();
  const std::size_t m = curve.size();
  const detail::RadialFrame fr(curve);
  const auto& w = *periodic_singular_weights(m, sv);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double row = w[0] * dot(fr.n[i], fr.n[i]) * std::pow(fr.speed[i], -sv);
    for (std::size_t k = 1; k < m; ++k) {
      const std::size_t j = (i + k) % m;
      const Vec2 d = fr.x[j] - fr.x[i];
      row += w[k] * dot(fr.n[i], fr.n[j]) * std::pow(dot(d, d) / detail::chord_factor(k, m), -0.5 * sv);
    }
    total += row;
  }
  const double v = total * (2.0 * std::numbers::pi / static_cast<double>(m)) / (sv * sv);
  if (!std::isfinite(v) || !(v > 0.0)) throw NonConvergent("s-perimeter quadrature failed", 0);
  return v;
}

double perimeter_normalization(FractionalOrder s) {
  static std::mutex mu;
  static std::map<double, double> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(s.value()); it != cache.end()) return it->second;
  }
  // Shrinking circle: R' = -varpi R^{-s} and P(R) = P(1) R^{2-s}; match dP/dt = -|dB_R| varpi^2 R^{-2s}.
  const double unit = s_perimeter_unnormalized(RadialCurve::circle(64, 1.0), s);
  const double c = 2.0 * std::numbers::pi * varpi(s) / ((2.0 - s.value()) * unit);
  std::lock_guard lock(mu);
  return cache.emplace(s.value(), c).first->second;
}

double s_perimeter(const RadialCurve& curve, FractionalOrder s) {
  return perimeter_normalization(s) * s_perimeter_unnormalized(curve, s);
}

}  // namespace fracflow
