#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracflow/curvature.hpp"
#include "fracflow/geometry.hpp"

namespace fracflow {

enum class Scheme { euler, rk2 };

enum class StopReason { reached_t_max, extinction_imminent, star_shape_lost, curvature_blowup, step_failure };

std::string_view to_string(StopReason r) noexcept;
std::string_view to_string(Scheme s) noexcept;

struct FlowState {
  double time = 0.0;
  Shape shape;
  CurvatureField field;
  std::size_t step_count = 0;
};

struct Trajectory {
  std::vector<FlowState> states;
  std::vector<FlowState> peer_states;  // same time stamps as `states` when a peer is evolved
  StopReason stop_reason = StopReason::reached_t_max;
  std::string stop_detail;
};

/// State at `time` with its curvature field.
FlowState make_state(Shape shape, FractionalOrder s, const QuadratureSpec& q = {}, double time = 0.0,
                     unsigned workers = 1);

/// d f / dt = -H_s |X'| / f at each angular node.
std::vector<double> rhs_radial(const FlowState& state);
/// d u / dt = -H_s sqrt(1 + u'^2); the two end nodes are held fixed.
std::vector<double> rhs_graph(const FlowState& state);
std::vector<double> rhs(const FlowState& state);

/// Largest stable explicit step: cfl * min(2 / mu(pi / h_min), h_min / max|rhs|), with
/// mu(k) the growth rate of a k-mode of the linearised flow on a straight line.
double dt_max(const FlowState& state, FractionalOrder s, double cfl = 0.5);

/// One explicit step. Throws StepFailure if a radius drops to `f_floor` or
/// below, or any value is non-finite.
FlowState step(const FlowState& state, double dt, Scheme scheme, FractionalOrder s, const QuadratureSpec& q = {},
               double f_floor = 0.0, unsigned workers = 1);

/// Radius of the shrinking circle: (R0^{s+1} - varpi (s+1) t)^{1/(s+1)}.
double exact_circle(double r0, FractionalOrder s, double varpi_value, double t);
/// R0^{s+1} / (varpi (s+1)).
double extinction_time(double r0, FractionalOrder s, double varpi_value);

struct FlowConfig {
  Scheme scheme = Scheme::rk2;
  double cfl = 0.5;
  double t_max = std::numeric_limits<double>::infinity();
  std::size_t record_every = 10;
  /// Stop once min f < f_floor_fraction * (initial min f).
  double f_floor_fraction = 0.05;
  double blowup_threshold = 1e6;
  std::size_t max_steps = 200000;
  int max_halvings = 8;
  double fixed_dt = 0.0;  // > 0 overrides the stability rule
  unsigned workers = 1;
};

/// Integrates until a stopping rule fires. A peer shape (same class) is
/// advanced with the same step sequence; the run stops if either one trips a rule.
Trajectory run(const Shape& initial, const std::optional<Shape>& peer, FractionalOrder s, const FlowConfig& cfg,
               const QuadratureSpec& q = {});

}  // namespace fracflow
