#include "fracflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracflow/errors.hpp"

namespace fracflow {

std::string_view to_string(Quantity q) noexcept {
  switch (q) {
    case Quantity::s_perimeter_down: return "s_perimeter_down";
    case Quantity::height_v_down: return "height_v_down";
    case Quantity::hs_min_positive: return "hs_min_positive";
    case Quantity::star_v_bound: return "star_v_bound";
    case Quantity::containment_nonneg: return "containment_nonneg";
  }
  return "unknown";
}

namespace {

void warn(DiagnosticsRecord& r, const std::string& what) {
  r.warning = true;
  if (!r.warning_text.empty()) r.warning_text += "; ";
  r.warning_text += what;
}

void radial_snapshot(DiagnosticsRecord& r, const RadialCurve& c, const CurvatureField& field, FractionalOrder s,
                     const FlowState* peer, const SnapshotOptions& opt) {
  r.min_f = c.min_radius();
  r.max_f = c.max_radius();
  r.hs_min = field.min;
  r.hs_max = field.max;
  const auto pts = boundary_points(c);
  double vmax = 0.0, diss = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    vmax = std::max(vmax, 1.0 / dot(pts[i].position - c.center(), pts[i].normal));
    diss += field.values[i] * field.values[i] * pts[i].arc_element;
  }
  r.star_v_max = vmax;
  r.dissipation = diss;
  if (opt.perimeter) {
    try {
      r.s_perimeter = s_perimeter(c, s);
    } catch (const Error& e) {
      warn(r, e.what());
    }
  }
  if (peer) {
    const auto* pc = std::get_if<RadialCurve>(&peer->shape);
    if (!pc || !(pc->center() == c.center())) {
      warn(r, "containment needs a concentric radial peer");
      return;
    }
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double fp = pc->size() == c.size() ? pc->samples()[i] : pc->evaluate(c.theta(i)).f;
      margin = std::min(margin, fp - c.samples()[i]);
    }
    r.containment_margin = margin;
  }
}

void graph_snapshot(DiagnosticsRecord& r, const GraphCurve& g, const CurvatureField& field, const FlowState* peer,
                    const SnapshotOptions& opt) {
  const auto u = g.heights();
  r.min_f = *std::min_element(u.begin(), u.end());
  r.max_f = *std::max_element(u.begin(), u.end());
  const double lim = opt.inner_fraction * g.half_width() * (1.0 + 1e-12);
  double hmin = std::numeric_limits<double>::infinity(), hmax = -hmin, vmax = 0.0, vh = -hmin;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (std::abs(g.x(j)) > lim) continue;
    const double du = g.slope(g.x(j));
    const double v = std::sqrt(1.0 + du * du);
    hmin = std::min(hmin, field.values[j]);
    hmax = std::max(hmax, field.values[j]);
    vmax = std::max(vmax, v);
    vh = std::max(vh, v * field.values[j]);
  }
  r.hs_min = hmin;
  r.hs_max = hmax;
  r.height_v_max = vmax;
  r.vhs_max = vh;
  if (peer) {
    const auto* pg = std::get_if<GraphCurve>(&peer->shape);
    if (!pg || pg->size() != g.size() || pg->half_width() != g.half_width()) {
      warn(r, "containment needs a peer graph on the same grid");
      return;
    }
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < g.size(); ++j)
      if (std::abs(g.x(j)) <= lim) margin = std::min(margin, pg->heights()[j] - u[j]);
    r.containment_margin = margin;
  }
}

}  // namespace

DiagnosticsRecord snapshot(const FlowState& state, FractionalOrder s, const FlowState* peer,
                           const SnapshotOptions& opt) {
  DiagnosticsRecord r;
  r.time = state.time;
  r.step = state.step_count;
  if (const auto* c = std::get_if<RadialCurve>(&state.shape)) {
    radial_snapshot(r, *c, state.field, s, peer, opt);
  } else {
    graph_snapshot(r, std::get<GraphCurve>(state.shape), state.field, peer, opt);
  }
  return r;
}

std::vector<DiagnosticsRecord> records(const Trajectory& tr, FractionalOrder s, bool with_f5,
                                       const SnapshotOptions& opt) {
  std::vector<DiagnosticsRecord> out;
  out.reserve(tr.states.size());
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const FlowState* peer = k < tr.peer_states.size() ? &tr.peer_states[k] : nullptr;
    out.push_back(snapshot(tr.states[k], s, peer, opt));
  }
  if (!with_f5) return out;
  for (std::size_t k = 1; k + 1 < tr.states.size(); ++k) {
    const auto* now = std::get_if<RadialCurve>(&tr.states[k].shape);
    if (!now) break;
    auto sample = [&](std::size_t idx) {
      return FieldSample{tr.states[idx].time, std::get<RadialCurve>(tr.states[idx].shape), tr.states[idx].field};
    };
    const FieldSample before = sample(k - 1), mid = sample(k), after = sample(k + 1);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < now->size(); ++i) {
      const F5Sides f5 = f5_residual(before, mid, after, i, s);
      worst = std::max(worst, std::abs(f5.lhs - f5.rhs));
      scale = std::max(scale, std::abs(f5.rhs));
    }
    out[k].f5_residual_max = scale > 0.0 ? worst / scale : worst;
  }
  return out;
}

namespace {

double required(const std::optional<double>& v, Quantity q) {
  if (!v) throw MissingField(std::string("records do not carry the field needed for ") + std::string(to_string(q)));
  return *v;
}

void note_violation(MonotoneReport& rep, double slack, double time) {
  ++rep.checked;
  if (rep.checked == 1 || slack < rep.margin) rep.margin = slack;
  if (slack < 0.0 && rep.passed) {
    rep.passed = false;
    rep.first_violation_time = time;
  }
}

}  // namespace

MonotoneReport check_monotone(const std::vector<DiagnosticsRecord>& recs, Quantity quantity, FractionalOrder s,
                              const CheckOptions& opt) {
  MonotoneReport rep;
  rep.quantity = quantity;
  if (recs.empty()) {
    rep.note = "no records";
    return rep;
  }
  const double tol = opt.tol;
  switch (quantity) {
    case Quantity::s_perimeter_down:
      for (std::size_t k = 1; k < recs.size(); ++k) {
        const double prev = required(recs[k - 1].s_perimeter, quantity);
        note_violation(rep, prev + tol - required(recs[k].s_perimeter, quantity), recs[k].time);
      }
      break;
    case Quantity::height_v_down: {
      const double v0 = required(recs[0].height_v_max, quantity);
      for (std::size_t k = 1; k < recs.size(); ++k) {
        const double v = required(recs[k].height_v_max, quantity);
        const double prev = required(recs[k - 1].height_v_max, quantity);
        note_violation(rep, std::min(prev, v0) + tol - v, recs[k].time);
      }
      break;
    }
    case Quantity::hs_min_positive:
      if (!(recs[0].hs_min > 0.0)) {
        rep.note = "initial curvature not positive; nothing to preserve";
        break;
      }
      for (const auto& r : recs) note_violation(rep, r.hs_min + tol, r.time);
      break;
    case Quantity::star_v_bound: {
      const double sv = s.value();
      const double c = opt.star_coefficient.value_or(1.0 - sv * sv * (1.0 - sv));
      const double v0 = required(recs[0].star_v_max, quantity);
      double sup_h = recs[0].hs_max;
      for (std::size_t k = 1; k < recs.size(); ++k) {  // the bound is v0 itself at t = 0
        const auto& r = recs[k];
        sup_h = std::max(sup_h, r.hs_max);
        const double den = 1.0 - c * r.time * v0 * sup_h;
        const double bound = den > 0.0 ? v0 / den : std::numeric_limits<double>::infinity();
        note_violation(rep, std::min(bound + tol - required(r.star_v_max, quantity), 1e300), r.time);
      }
      break;
    }
    case Quantity::containment_nonneg:
      for (const auto& r : recs) note_violation(rep, required(r.containment_margin, quantity) + tol, r.time);
      break;
  }
  return rep;
}

RateReport perimeter_rate_check(const std::vector<DiagnosticsRecord>& recs, double tol_rel,
                                double min_radius_fraction) {
  RateReport rep;
  if (recs.size() < 3) return rep;
  const double floor = min_radius_fraction * recs[0].min_f;
  for (std::size_t k = 1; k + 1 < recs.size(); ++k) {
    const double d = required(recs[k].dissipation, Quantity::s_perimeter_down);
    if (-d > 0.0) rep.rate_nonpositive = false;
    if (recs[k + 1].min_f < floor) continue;
    const double dp = (required(recs[k + 1].s_perimeter, Quantity::s_perimeter_down) -
                       required(recs[k - 1].s_perimeter, Quantity::s_perimeter_down)) /
                      (recs[k + 1].time - recs[k - 1].time);
    const double mismatch = std::abs(dp + d) / d;
    ++rep.checked;
    if (mismatch > rep.worst_mismatch) {
      rep.worst_mismatch = mismatch;
      rep.worst_time = recs[k].time;
    }
  }
  rep.passed = rep.checked > 0 && rep.worst_mismatch <= tol_rel && rep.rate_nonpositive;
  return rep;
}

SandwichReport sandwich_check(const std::vector<FlowState>& states, FractionalOrder s, double varpi_value,
                              double tol_rel) {
  SandwichReport rep;
  if (states.empty()) return rep;
  const auto& c0 = std::get<RadialCurve>(states.front().shape);
  const double sp1 = 1.0 + s.value();
  const double c = varpi_value * sp1;
  const double lo0 = std::pow(c0.min_radius(), sp1), hi0 = std::pow(c0.max_radius(), sp1);
  for (const auto& st : states) {
    const auto& cur = std::get<RadialCurve>(st.shape);
    const double lower = std::pow(std::max(lo0 - c * st.time, 0.0), 1.0 / sp1);
    const double upper = std::pow(std::max(hi0 - c * st.time, 0.0), 1.0 / sp1);
    const double v = std::max((lower - cur.min_radius()) / cur.min_radius(), (cur.max_radius() - upper) / cur.max_radius());
    ++rep.checked;
    rep.worst_violation = std::max(rep.worst_violation, v);
    if (v > tol_rel && rep.passed) {
      rep.passed = false;
      rep.first_violation_time = st.time;
    }
  }
  return rep;
}

}  // namespace fracflow
