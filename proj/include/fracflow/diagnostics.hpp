#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracflow/curvature.hpp"
#include "fracflow/flow.hpp"

namespace fracflow {

struct DiagnosticsRecord {
  double time = 0.0;
  std::size_t step = 0;
  double min_f = 0.0;  // radius (closed curves) or height (graphs)
  double max_f = 0.0;
  double hs_min = 0.0;
  double hs_max = 0.0;
  std::optional<double> s_perimeter;
  std::optional<double> dissipation;  // int H_s^2 dsigma
  std::optional<double> height_v_max;
  std::optional<double> star_v_max;
  std::optional<double> vhs_max;
  std::optional<double> f5_residual_max;
  std::optional<double> containment_margin;
  bool warning = false;
  std::string warning_text;
};

/// Graph quantities are taken over the nodes with |x| <= inner_fraction * L.
struct SnapshotOptions {
  double inner_fraction = 0.8;
  bool perimeter = true;
};

/// `peer` is the outer set of a comparison pair; the margin is min(f_peer - f).
DiagnosticsRecord snapshot(const FlowState& state, FractionalOrder s, const FlowState* peer = nullptr,
                           const SnapshotOptions& opt = {});

/// One record per recorded state. With `with_f5`, interior records of closed
/// curves also carry max_i |lhs_i - rhs_i| / max_i |rhs_i| of the curvature
/// evolution identity, using the neighbouring records for the time derivative.
std::vector<DiagnosticsRecord> records(const Trajectory& tr, FractionalOrder s, bool with_f5 = false,
                                       const SnapshotOptions& opt = {});

enum class Quantity { s_perimeter_down, height_v_down, hs_min_positive, star_v_bound, containment_nonneg };

std::string_view to_string(Quantity q) noexcept;

struct CheckOptions {
  double tol = 0.0;
  /// Coefficient c in v(t) <= v0 / (1 - c t v0 supH); default 1 - s^2 (1 - s).
  std::optional<double> star_coefficient;
};

struct MonotoneReport {
  Quantity quantity{};
  bool passed = true;
  std::optional<double> first_violation_time;
  double margin = 0.0;  // smallest slack over all checks (negative: violation size)
  std::size_t checked = 0;
  std::string note;
};

/// Throws MissingField if the records lack the quantity.
MonotoneReport check_monotone(const std::vector<DiagnosticsRecord>& recs, Quantity quantity, FractionalOrder s,
                              const CheckOptions& opt = {});

struct RateReport {
  bool passed = true;
  double worst_mismatch = 0.0;  // relative |dP/dt + int H^2| / int H^2
  std::optional<double> worst_time;
  bool rate_nonpositive = true;
  std::size_t checked = 0;
};

/// Centred-difference dP/dt against -int H_s^2 dsigma at interior records
/// whose min radius is at least `min_radius_fraction` of the initial one.
RateReport perimeter_rate_check(const std::vector<DiagnosticsRecord>& recs, double tol_rel,
                                double min_radius_fraction = 0.3);

struct SandwichReport {
  bool passed = true;
  double worst_violation = 0.0;  // relative
  std::optional<double> first_violation_time;
  std::size_t checked = 0;
};

/// Concentric ball bounds: inner/outer radii of the first state about its
/// centre shrink by the exact circle law and must bracket f(., t). Violations
/// are measured relative to the current radius.
SandwichReport sandwich_check(const std::vector<FlowState>& states, FractionalOrder s, double varpi_value,
                              double tol_rel);

}  // namespace fracflow
