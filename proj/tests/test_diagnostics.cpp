#include <doctest.h>

#include <cmath>

#include "fracflow/diagnostics.hpp"
#include "fracflow/errors.hpp"

using namespace fracflow;

namespace {

// Records of the exact shrinking unit circle.
std::vector<DiagnosticsRecord> exact_circle_records(FractionalOrder s, std::size_t n) {
  const double w = varpi(s);
  const double te = extinction_time(1.0, s, w);
  std::vector<DiagnosticsRecord> out;
  for (std::size_t k = 0; k < n; ++k) {
    DiagnosticsRecord r;
    r.time = 0.8 * te * k / (n - 1);
    const double R = exact_circle(1.0, s, w, r.time);
    r.min_f = r.max_f = R;
    r.hs_min = r.hs_max = w * std::pow(R, -s.value());
    r.star_v_max = 1.0 / R;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("circle snapshot") {
  const FractionalOrder s(0.5);
  const double R = 1.5;
  const auto rec = snapshot(make_state(RadialCurve::circle(64, R), s), s);
  CHECK(rec.hs_min == doctest::Approx(varpi(s) * std::pow(R, -0.5)).epsilon(1e-10));
  CHECK(rec.hs_max == doctest::Approx(rec.hs_min).epsilon(1e-12));
  CHECK(*rec.star_v_max == doctest::Approx(1.0 / R).epsilon(1e-12));
  CHECK(*rec.dissipation == doctest::Approx(2 * M_PI * R * rec.hs_min * rec.hs_min).epsilon(1e-10));
  CHECK(rec.s_perimeter.has_value());
  CHECK_FALSE(rec.height_v_max.has_value());
  CHECK_FALSE(rec.warning);
}

TEST_CASE("flat graph snapshot") {
  const FractionalOrder s(0.5);
  const auto rec = snapshot(make_state(GraphCurve(std::vector<double>(65, 0.0), 5.0), s), s);
  CHECK(*rec.height_v_max == 1.0);
  CHECK(std::abs(*rec.vhs_max) < 1e-12);
  CHECK_FALSE(rec.s_perimeter.has_value());
  CHECK_FALSE(rec.star_v_max.has_value());
}

TEST_CASE("nested disks containment margin") {
  const FractionalOrder s(0.5);
  const auto inner = make_state(RadialCurve::circle(64, 1.0), s);
  const auto outer = make_state(RadialCurve::circle(128, 2.0), s);
  const auto rec = snapshot(inner, s, &outer);
  CHECK(*rec.containment_margin == doctest::Approx(1.0).epsilon(1e-12));
  const auto off = make_state(RadialCurve::circle(64, 2.0, {0.1, 0.0}), s);
  const auto rec2 = snapshot(inner, s, &off);
  CHECK(rec2.warning);
  CHECK_FALSE(rec2.containment_margin.has_value());
}

TEST_CASE("monotone checks") {
  const FractionalOrder s(0.5);
  std::vector<DiagnosticsRecord> recs(4);
  for (std::size_t k = 0; k < recs.size(); ++k) {
    recs[k].time = 0.1 * k;
    recs[k].s_perimeter = 10.0 - k;
    recs[k].hs_min = 1.0;
  }
  auto rep = check_monotone(recs, Quantity::s_perimeter_down, s);
  CHECK(rep.passed);
  CHECK(rep.checked == 3);
  CHECK(rep.margin == doctest::Approx(1.0));
  recs[2].s_perimeter = 9.5;
  rep = check_monotone(recs, Quantity::s_perimeter_down, s);
  CHECK_FALSE(rep.passed);
  CHECK(*rep.first_violation_time == doctest::Approx(0.2));
  CHECK(rep.margin == doctest::Approx(-0.5));
  CHECK(check_monotone(recs, Quantity::s_perimeter_down, s, {0.6}).passed);

  CHECK(check_monotone(recs, Quantity::hs_min_positive, s).passed);
  recs[3].hs_min = -0.1;
  CHECK_FALSE(check_monotone(recs, Quantity::hs_min_positive, s).passed);
  CHECK_THROWS_AS(check_monotone(recs, Quantity::height_v_down, s), MissingField);
  CHECK_THROWS_AS(check_monotone(recs, Quantity::containment_nonneg, s), MissingField);
}

TEST_CASE("star bound on the exact circle") {
  // On a circle v = 1/R obeys dv/dt = H v^2 exactly, so the bound with
  // coefficient c needs c >= 1; the displayed 1 - s^2(1 - s) is smaller.
  const FractionalOrder s(0.5);
  const auto recs = exact_circle_records(s, 40);
  CHECK_FALSE(check_monotone(recs, Quantity::star_v_bound, s).passed);
  CheckOptions unit;
  unit.star_coefficient = 1.0;
  CHECK(check_monotone(recs, Quantity::star_v_bound, s, unit).passed);
  CheckOptions corrected;
  corrected.star_coefficient = 1.0 + s.value();
  CHECK(check_monotone(recs, Quantity::star_v_bound, s, corrected).passed);
}

TEST_CASE("perimeter rate and sandwich on a short circle run") {
  const FractionalOrder s(0.5);
  FlowConfig cfg;
  cfg.t_max = 0.05;
  cfg.record_every = 4;
  const auto tr = run(RadialCurve::circle(64, 1.0), std::nullopt, s, cfg);
  const auto recs = records(tr, s, true);
  const auto rate = perimeter_rate_check(recs, 0.05);
  CHECK(rate.passed);
  CHECK(rate.checked > 0);
  CHECK(rate.worst_mismatch < 1e-3);
  const auto sw = sandwich_check(tr.states, s, varpi(s), 1e-3);
  CHECK(sw.passed);
  CHECK(sw.checked == tr.states.size());
  for (std::size_t k = 1; k + 1 < recs.size(); ++k) CHECK(*recs[k].f5_residual_max < 1e-2);
  CHECK(check_monotone(recs, Quantity::s_perimeter_down, s).passed);
}

TEST_CASE("perimeter rate needs the perimeter") {
  std::vector<DiagnosticsRecord> recs(3);
  CHECK_THROWS_AS(perimeter_rate_check(recs, 0.1), MissingField);
}
