#pragma once

#include <cstddef>
#include <vector>

#include "fracflow/geometry.hpp"

namespace fracflow {

/// Knobs of the singular-integral evaluation.
struct QuadratureSpec {
  double cylinder_radius = 0.0;  // 0 selects min(0.2 / max curvature, 0.1 * diameter)
  double graded_exponent = 0.0;  // 0 selects 2 / (1 - s)
  int near_panels = 4;
  int far_panels = 2;
  int max_depth = 12;
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  /// Largest tolerated relative k^2-weighted spectral mass in the upper
  /// quarter of the radial spectrum before the boundary route refuses.
  double spectral_tail_tol = 1e-6;

  void validate() const;
};

struct CurvatureField {
  std::vector<double> values;
  double min = 0.0;
  double max = 0.0;

  static CurvatureField from_values(std::vector<double> values);
};

/// Fast route: boundary integral 2(1-s) int (y-x).nu(y) |x-y|^{-2-s} dsigma(y)
/// with spectral (radial) or piecewise-polynomial (graph) product integration.
double hs_boundary(const Shape& shape, std::size_t at, FractionalOrder s, const QuadratureSpec& q = {});

/// hs_boundary at every node. Nodes are split across `workers` threads; each
/// value is computed independently so the result does not depend on the split.
CurvatureField hs_field(const Shape& shape, FractionalOrder s, const QuadratureSpec& q = {},
                        unsigned workers = 1);

enum class Side { set, complement };

/// Reference route: area integral of the signed indicator, split at a square
/// cylinder around x into a near part (tangent-line cancellation, graded
/// radial quadrature) and a far part (exact radial/column primitives).
double hs_oracle(const Shape& shape, std::size_t at, FractionalOrder s, const QuadratureSpec& q = {},
                 Side side = Side::set);

struct TangentialGradient {
  Vec2 vector;                    // (d H / d sigma) * unit tangent
  double divergence_form = 0.0;   // 2s(1-s) PV int tau.nu(y) |x-y|^{-2-s} dsigma
  double direct_form = 0.0;       // (2+s)s(1-s) PV int chi (y-x).tau |x-y|^{-4-s} dy
};

/// Both evaluations of the arc-length derivative of H_s at a node.
TangentialGradient tangential_gradient_hs(const Shape& shape, std::size_t at, FractionalOrder s,
                                          const QuadratureSpec& q = {});

/// Divergence-form derivative dH/dsigma at every node of a closed curve.
std::vector<double> tangential_gradient_field(const RadialCurve& curve, FractionalOrder s);

/// Unit-ball curvature, computed once per s with the oracle and cached.
double varpi(FractionalOrder s);

/// int_E int_{E^c} |x-y|^{-2-s} dx dy.
double s_perimeter_unnormalized(const RadialCurve& curve, FractionalOrder s);
/// Constant making d/dt P_s = -int H_s^2 dsigma exact on shrinking circles.
double perimeter_normalization(FractionalOrder s);
double s_perimeter(const RadialCurve& curve, FractionalOrder s);

struct F5Sides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// 2s(1-s) [PV int (H(y)-H(x)) K dsigma + H(x) PV int (1 - nu(x).nu(y)) K dsigma].
double f5_rhs(const RadialCurve& curve, const CurvatureField& field, std::size_t at, FractionalOrder s);

struct FieldSample {
  double time = 0.0;
  RadialCurve shape;
  CurvatureField field;
};

/// lhs: normal-following time derivative of H_s at node `at`, three-point
/// difference over (before, now, after) on uneven spacing; rhs: f5_rhs on `now`.
F5Sides f5_residual(const FieldSample& before, const FieldSample& now, const FieldSample& after,
                    std::size_t at, FractionalOrder s);

}  // namespace fracflow
