#include "fracflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fracflow/errors.hpp"

namespace fracflow {

std::string_view to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::reached_t_max: return "reached_t_max";
    case StopReason::extinction_imminent: return "extinction_imminent";
    case StopReason::star_shape_lost: return "star_shape_lost";
    case StopReason::curvature_blowup: return "curvature_blowup";
    case StopReason::step_failure: return "step_failure";
  }
  return "unknown";
}

std::string_view to_string(Scheme s) noexcept { return s == Scheme::euler ? "euler" : "rk2"; }

FlowState make_state(Shape shape, FractionalOrder s, const QuadratureSpec& q, double time, unsigned workers) {
  CurvatureField field = hs_field(shape, s, q, workers);
  return FlowState{time, std::move(shape), std::move(field), 0};
}

std::vector<double> rhs_radial(const FlowState& state) {
  const auto& c = std::get<RadialCurve>(state.shape);
  const auto f = c.samples();
  const auto df = spectral_derivative(c, 1);
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -state.field.values[i] * std::hypot(f[i], df[i]) / f[i];
  return out;
}

std::vector<double> rhs_graph(const FlowState& state) {
  const auto& g = std::get<GraphCurve>(state.shape);
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t j = 1; j + 1 < out.size(); ++j) {
    const double du = g.slope(g.x(j));
    out[j] = -state.field.values[j] * std::sqrt(1.0 + du * du);
  }
  return out;
}

std::vector<double> rhs(const FlowState& state) {
  return std::holds_alternative<RadialCurve>(state.shape) ? rhs_radial(state) : rhs_graph(state);
}

namespace {

double smallest_arc_element(const Shape& shape) {
  double h = std::numeric_limits<double>::infinity();
  for (const auto& p : boundary_points(shape)) h = std::min(h, p.arc_element);
  return h;
}

// Decay rate of exp(ikx) perturbations of a straight line.
double linear_symbol(double k, double s) {
  const double c = 2.0 * s * (1.0 - s) * std::numbers::pi / (std::tgamma(2.0 + s) * std::cos(0.5 * std::numbers::pi * s));
  return c * std::pow(k, 1.0 + s);
}

Shape advanced(const Shape& base, const std::vector<double>& rate, double dt, double f_floor) {
  if (const auto* r = std::get_if<RadialCurve>(&base)) {
    std::vector<double> f(r->samples().begin(), r->samples().end());
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] += dt * rate[i];
      if (!std::isfinite(f[i]) || f[i] <= f_floor) throw StepFailure("f", i, f[i]);
    }
    return RadialCurve(std::move(f), r->center());
  }
  const auto& g = std::get<GraphCurve>(base);
  std::vector<double> u(g.heights().begin(), g.heights().end());
  for (std::size_t j = 0; j < u.size(); ++j) {
    u[j] += dt * rate[j];
    if (!std::isfinite(u[j])) throw StepFailure("u", j, u[j]);
  }
  return GraphCurve(std::move(u), g.half_width());
}

Shape combined(const Shape& base, const std::vector<double>& k1, const std::vector<double>& k2, double dt,
               double f_floor) {
  std::vector<double> avg(k1.size());
  for (std::size_t i = 0; i < avg.size(); ++i) avg[i] = 0.5 * (k1[i] + k2[i]);
  return advanced(base, avg, dt, f_floor);
}

double min_radius(const Shape& shape) {
  if (const auto* r = std::get_if<RadialCurve>(&shape)) return r->min_radius();
  return std::numeric_limits<double>::infinity();
}

bool star_shaped(const Shape& shape) {
  const auto* r = std::get_if<RadialCurve>(&shape);
  if (!r) return true;
  for (const auto& p : boundary_points(*r))
    if (!(dot(p.position - r->center(), p.normal) > 0.0)) return false;
  return true;
}

double max_abs(const CurvatureField& f) { return std::max(std::abs(f.min), std::abs(f.max)); }

}  // namespace

double dt_max(const FlowState& state, FractionalOrder s, double cfl) {
  const double h = smallest_arc_element(state.shape);
  double dt = 2.0 / linear_symbol(std::numbers::pi / h, s.value());
  double peak = 0.0;
  for (double v : rhs(state)) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) dt = std::min(dt, h / peak);
  return cfl * dt;
}

FlowState step(const FlowState& state, double dt, Scheme scheme, FractionalOrder s, const QuadratureSpec& q,
               double f_floor, unsigned workers) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const auto k1 = rhs(state);
  Shape shape = advanced(state.shape, k1, dt, f_floor);
  if (scheme == Scheme::rk2) {
    const FlowState mid = make_state(std::move(shape), s, q, state.time + dt, workers);
    shape = combined(state.shape, k1, rhs(mid), dt, f_floor);
  }
  FlowState next = make_state(std::move(shape), s, q, state.time + dt, workers);
  next.step_count = state.step_count + 1;
  return next;
}

double extinction_time(double r0, FractionalOrder s, double varpi_value) {
  if (!(r0 > 0.0) || !(varpi_value > 0.0)) throw std::domain_error("radius and varpi must be positive");
  return std::pow(r0, 1.0 + s.value()) / (varpi_value * (1.0 + s.value()));
}

double exact_circle(double r0, FractionalOrder s, double varpi_value, double t) {
  const double te = extinction_time(r0, s, varpi_value);
  if (t < 0.0 || t > te) throw std::domain_error("time outside [0, extinction time]");
  if (t == te) return 0.0;
  const double sp1 = 1.0 + s.value();
  const double base = std::pow(r0, sp1) - varpi_value * sp1 * t;
  return base <= 0.0 ? 0.0 : std::pow(base, 1.0 / sp1);
}

Trajectory run(const Shape& initial, const std::optional<Shape>& peer, FractionalOrder s, const FlowConfig& cfg,
               const QuadratureSpec& q) {
  if (!(cfg.t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  if (cfg.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  if (!(cfg.cfl > 0.0)) throw std::invalid_argument("cfl must be positive");
  if (peer && peer->index() != initial.index()) throw std::invalid_argument("peer shape must be of the same class");

  Trajectory tr;
  FlowState a = make_state(initial, s, q, 0.0, cfg.workers);
  std::optional<FlowState> b;
  if (peer) b = make_state(*peer, s, q, 0.0, cfg.workers);
  const double floor_a = cfg.f_floor_fraction * min_radius(a.shape);
  const double floor_b = b ? cfg.f_floor_fraction * min_radius(b->shape) : 0.0;
  auto hard = [](double f) { return std::isfinite(f) ? 0.5 * f : 0.0; };

  auto record = [&] {
    tr.states.push_back(a);
    if (b) tr.peer_states.push_back(*b);
  };
  auto finish = [&](StopReason r, std::string detail) {
    if (tr.states.empty() || tr.states.back().step_count != a.step_count) record();
    tr.stop_reason = r;
    tr.stop_detail = std::move(detail);
    return tr;
  };
  record();

  for (;;) {
    if (min_radius(a.shape) < floor_a || (b && min_radius(b->shape) < floor_b))
      return finish(StopReason::extinction_imminent, "radius below extinction floor");
    if (!star_shaped(a.shape) || (b && !star_shaped(b->shape)))
      return finish(StopReason::star_shape_lost, "x.nu <= 0 at some node");
    if (max_abs(a.field) > cfg.blowup_threshold || (b && max_abs(b->field) > cfg.blowup_threshold))
      return finish(StopReason::curvature_blowup, "|H_s| above threshold");
    if (a.time >= cfg.t_max) return finish(StopReason::reached_t_max, "");
    if (a.step_count >= cfg.max_steps) return finish(StopReason::step_failure, "step budget exhausted");

    double dt = cfg.fixed_dt > 0.0 ? cfg.fixed_dt : dt_max(a, s, cfg.cfl);
    if (b && !(cfg.fixed_dt > 0.0)) dt = std::min(dt, dt_max(*b, s, cfg.cfl));
    const double t0 = a.time;
    if (t0 + dt >= cfg.t_max) dt = cfg.t_max - t0;

    std::optional<FlowState> na, nb;
    for (int halving = 0;; ++halving) {
      try {
        na = step(a, dt, cfg.scheme, s, q, hard(floor_a), cfg.workers);
        if (b) nb = step(*b, dt, cfg.scheme, s, q, hard(floor_b), cfg.workers);
        break;
      } catch (const Error& e) {
        if (halving >= cfg.max_halvings) return finish(StopReason::step_failure, e.what());
        dt *= 0.5;
      }
    }
    a = std::move(*na);
    if (dt == cfg.t_max - t0) a.time = cfg.t_max;  // land exactly on t_max
    if (b) {
      b = std::move(*nb);
      b->time = a.time;
    }
    if (a.step_count % cfg.record_every == 0) record();
  }
}

}  // namespace fracflow
