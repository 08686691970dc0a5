#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "fracflow/vec2.hpp"

namespace fracflow {

/// Order s of the fractional curvature, strictly inside (0, 1).
class FractionalOrder {
 public:
  explicit FractionalOrder(double s);

  double value() const noexcept { return s_; }
  /// s(1-s), the factor in front of the curvature integral.
  double normalization() const noexcept { return s_ * (1.0 - s_); }

 private:
  double s_;
};

/// Value and first derivatives of a periodic radial function.
struct RadialJet {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};

/// Closed star-shaped curve {c + f(theta) (cos theta, sin theta)} sampled on
/// the uniform grid theta_i = 2 pi i / M. Between nodes the curve is the
/// trigonometric interpolant of the samples.
class RadialCurve {
 public:
  explicit RadialCurve(std::vector<double> samples, Vec2 center = {});

  static RadialCurve from_function(std::size_t m, const std::function<double(double)>& f,
                                   Vec2 center = {});
  static RadialCurve circle(std::size_t m, double radius, Vec2 center = {});
  /// Ellipse with semi-axes a (along x) and b, centred at `center`.
  static RadialCurve ellipse(std::size_t m, double a, double b, Vec2 center = {});

  std::size_t size() const noexcept { return samples_.size(); }
  std::span<const double> samples() const noexcept { return samples_; }
  Vec2 center() const noexcept { return center_; }
  double spacing() const noexcept;
  double theta(std::size_t i) const noexcept;
  /// Half spectrum c_0..c_{M/2} of the samples.
  std::span<const std::complex<double>> spectrum() const noexcept { return spectrum_; }

  RadialJet evaluate(double theta) const;
  Vec2 point(double theta) const;
  /// X(theta_i + delta) - X(theta_i), evaluated without cancellation for small delta.
  Vec2 chord(std::size_t i, double delta) const;

  double min_radius() const;
  double max_radius() const;

  RadialCurve scaled(double lambda) const;
  RadialCurve translated(Vec2 shift) const;
  /// Rigid rotation by alpha about the centre (resampled through the interpolant).
  RadialCurve rotated(double alpha) const;
  /// Same set with the sample array rolled by k nodes (exact rotation by 2 pi k / M).
  RadialCurve rolled(std::size_t k) const;

 private:
  std::vector<double> samples_;
  Vec2 center_;
  std::vector<std::complex<double>> spectrum_;
};

/// Entire graph {(x, u(x))} sampled on x_j = -L + j h, h = 2L/(N-1). Inside
/// [-L, L] the graph is the clamped cubic spline through the samples; outside
/// it continues linearly with the one-sided end slopes.
class GraphCurve {
 public:
  GraphCurve(std::vector<double> heights, double half_width);

  static GraphCurve from_function(std::size_t n, double half_width,
                                  const std::function<double(double)>& u);

  std::size_t size() const noexcept { return heights_.size(); }
  std::span<const double> heights() const noexcept { return heights_; }
  double half_width() const noexcept { return half_width_; }
  double spacing() const noexcept { return spacing_; }
  double x(std::size_t j) const noexcept;
  double left_slope() const noexcept { return left_slope_; }
  double right_slope() const noexcept { return right_slope_; }

  double height(double x) const;
  double slope(double x) const;
  double second_derivative(double x) const;
  Vec2 point(double x) const { return {x, height(x)}; }
  /// X(x_j + d) - X(x_j); exact piecewise-cubic algebra inside the adjacent knot intervals.
  Vec2 chord(std::size_t j, double d) const;

 private:
  std::vector<double> heights_;
  double half_width_;
  double spacing_;
  double left_slope_;
  double right_slope_;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

using Shape = std::variant<RadialCurve, GraphCurve>;

std::size_t node_count(const Shape& shape) noexcept;

struct BoundaryPoint {
  Vec2 position;
  Vec2 normal;   // outward unit normal
  Vec2 tangent;  // unit, direction of increasing parameter
  double arc_element = 0.0;
};

/// f'(theta_i) (or higher derivative) by trigonometric differentiation.
std::vector<double> spectral_derivative(const RadialCurve& curve, int order = 1);
/// Derivative of arbitrary periodic samples by trigonometric differentiation.
std::vector<double> spectral_derivative(std::span<const double> samples, int order = 1);

std::vector<BoundaryPoint> boundary_points(const RadialCurve& curve);
std::vector<BoundaryPoint> boundary_points(const GraphCurve& curve);
std::vector<BoundaryPoint> boundary_points(const Shape& shape);

/// Curvature of the classical (local) kind at every node; used for cylinder sizing.
std::vector<double> local_curvature(const Shape& shape);

}  // namespace fracflow
