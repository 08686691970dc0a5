#include <doctest.h>

#include <cmath>

#include "fracflow/errors.hpp"
#include "fracflow/flow.hpp"

using namespace fracflow;

TEST_CASE("exact circle law") {
  const FractionalOrder s(0.5);
  const double w = varpi(s);
  const double te = extinction_time(1.0, s, w);
  CHECK(te == doctest::Approx(1.0 / (1.5 * w)));
  CHECK(exact_circle(1.0, s, w, 0.0) == 1.0);
  CHECK(exact_circle(1.0, s, w, te) == 0.0);
  CHECK(exact_circle(1.0, s, w, 0.5 * te) == doctest::Approx(std::pow(0.5, 2.0 / 3.0)));
  CHECK_THROWS_AS(exact_circle(1.0, s, w, 1.01 * te), std::domain_error);
  CHECK_THROWS_AS(exact_circle(1.0, s, w, -1.0), std::domain_error);
}

TEST_CASE("radial right-hand side") {
  const FractionalOrder s(0.5);
  SUBCASE("circle moves uniformly inward") {
    const auto st = make_state(RadialCurve::circle(64, 2.0), s);
    for (double v : rhs_radial(st)) CHECK(v == doctest::Approx(-varpi(s) * std::pow(2.0, -0.5)).epsilon(1e-10));
  }
  SUBCASE("convex ellipse shrinks everywhere") {
    const auto st = make_state(RadialCurve::ellipse(128, 2.0, 1.0), s);
    for (double v : rhs_radial(st)) CHECK(v < 0.0);
  }
  SUBCASE("the speed factor is at least one") {
    const auto st = make_state(RadialCurve::from_function(64, [](double t) { return 1 + 0.3 * std::cos(3 * t); }), s);
    const auto r = rhs_radial(st);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::abs(r[i]) >= std::abs(st.field.values[i]) * (1 - 1e-14));
  }
}

TEST_CASE("graph right-hand side") {
  const FractionalOrder s(0.5);
  const auto flat = make_state(GraphCurve(std::vector<double>(33, 0.0), 4.0), s);
  for (double v : rhs_graph(flat)) CHECK(v == 0.0);
  const auto line = make_state(GraphCurve::from_function(33, 4.0, [](double x) { return -0.3 * x; }), s);
  for (double v : rhs_graph(line)) CHECK(std::abs(v) < 1e-9);
  const auto b = make_state(GraphCurve::from_function(129, 8.0, [](double x) { return std::exp(-x * x); }), s);
  const auto r = rhs_graph(b);
  CHECK(r[64] < 0.0);
  CHECK(r.front() == 0.0);
  CHECK(r.back() == 0.0);
}

TEST_CASE("single steps on the circle") {
  const FractionalOrder s(0.5);
  const double w = varpi(s);
  const auto st = make_state(RadialCurve::circle(64, 1.0), s);
  SUBCASE("euler") {
    const double dt = 1e-4;
    const auto next = step(st, dt, Scheme::euler, s);
    CHECK(next.step_count == 1);
    CHECK(next.time == doctest::Approx(dt));
    CHECK(std::get<RadialCurve>(next.shape).samples()[0] == doctest::Approx(1.0 - dt * w).epsilon(1e-12));
  }
  SUBCASE("rk2 local error is third order") {
    auto err = [&](double dt) {
      const auto next = step(st, dt, Scheme::rk2, s);
      return std::abs(std::get<RadialCurve>(next.shape).samples()[0] - exact_circle(1.0, s, w, dt));
    };
    const double ratio = err(0.004) / err(0.002);
    CHECK(ratio == doctest::Approx(8.0).epsilon(0.1));
  }
  SUBCASE("rejections") {
    CHECK_THROWS_AS(step(st, -1.0, Scheme::euler, s), std::invalid_argument);
    CHECK_THROWS_AS(step(st, 0.05, Scheme::euler, s, {}, 0.9), StepFailure);
  }
}

TEST_CASE("stability limit") {
  const FractionalOrder s(0.5);
  const auto coarse = make_state(RadialCurve::circle(32, 1.0), s);
  const auto fine = make_state(RadialCurve::circle(64, 1.0), s);
  // dt ~ h^{1+s}
  CHECK(dt_max(coarse, s) / dt_max(fine, s) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-9));
}

TEST_CASE("run bookkeeping") {
  const FractionalOrder s(0.5);
  FlowConfig cfg;
  cfg.t_max = 0.01;
  cfg.record_every = 3;
  const auto tr = run(RadialCurve::circle(32, 1.0), std::nullopt, s, cfg);
  CHECK(tr.stop_reason == StopReason::reached_t_max);
  CHECK(tr.states.back().time == 0.01);
  for (std::size_t k = 1; k < tr.states.size(); ++k) CHECK(tr.states[k].time > tr.states[k - 1].time);
  CHECK(tr.peer_states.empty());

  cfg.t_max = 0.0;
  CHECK_THROWS_AS(run(RadialCurve::circle(32, 1.0), std::nullopt, s, cfg), std::invalid_argument);
  cfg.t_max = 1.0;
  CHECK_THROWS_AS(run(RadialCurve::circle(32, 1.0), Shape(GraphCurve(std::vector<double>(17, 0.0), 1.0)), s, cfg),
                  std::invalid_argument);
}

TEST_CASE("run stops on the step budget") {
  const FractionalOrder s(0.5);
  FlowConfig cfg;
  cfg.max_steps = 2;
  const auto tr = run(RadialCurve::circle(32, 1.0), std::nullopt, s, cfg);
  CHECK(tr.stop_reason == StopReason::step_failure);
  CHECK(tr.states.back().step_count == 2);
}

TEST_CASE("linear graphs are stationary") {
  const FractionalOrder s(0.5);
  FlowConfig cfg;
  cfg.t_max = 0.2;
  const auto g0 = GraphCurve::from_function(65, 10.0, [](double x) { return 0.5 * x; });
  const auto tr = run(g0, std::nullopt, s, cfg);
  CHECK(tr.stop_reason == StopReason::reached_t_max);
  const auto& g = std::get<GraphCurve>(tr.states.back().shape);
  for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(g.heights()[j] - g0.heights()[j]) < 1e-10);
}

TEST_CASE("peers share time stamps") {
  const FractionalOrder s(0.5);
  FlowConfig cfg;
  cfg.t_max = 0.005;
  cfg.record_every = 1;
  const auto tr = run(RadialCurve::circle(32, 0.5), Shape(RadialCurve::circle(32, 1.0)), s, cfg);
  REQUIRE(tr.peer_states.size() == tr.states.size());
  for (std::size_t k = 0; k < tr.states.size(); ++k) CHECK(tr.peer_states[k].time == tr.states[k].time);
}
