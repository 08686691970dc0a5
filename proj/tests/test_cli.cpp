#include <doctest.h>

#include <charconv>
#include <sstream>

#include "fracflow/scenario.hpp"

using namespace fracflow;

namespace {

const char* minimal = R"({"name": "c", "s": 0.5, "shape": {"type": "circle", "R": 1}, "t_max": 10})";

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

ScenarioConfig tiny_circle() {
  auto cfg = parse_config(R"({"name": "tiny", "s": 0.5, "shape": {"type": "circle", "R": 1, "M": 32},
                              "t_max": 0.01, "record_every": 2})");
  cfg.checks = {{"exact_circle", 0.01}, {"s_perimeter_down", 1e-8}};
  return cfg;
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const auto cfg = parse_config(minimal);
  CHECK(cfg.name == "c");
  CHECK(cfg.t_max == 10.0);
  CHECK(cfg.stepper == Scheme::rk2);
  CHECK(cfg.cfl == 0.5);
  CHECK(cfg.record_every == 10);
  CHECK(cfg.shape.nodes == 256);
  CHECK(std::get<CircleSpec>(cfg.shape.kind).radius == 1.0);
  CHECK(cfg.checks.count("s_perimeter_down") == 1);
  CHECK(cfg.outputs.size() == 1);
}

TEST_CASE("validation errors name the field") {
  CHECK(field_of(R"({"name": "c", "s": 1.0, "shape": {"type": "circle", "R": 1}})") == "s");
  CHECK(field_of(R"({"name": "c", "s": 0.5, "shape": {"type": "circle", "R": 1},
                    "peer_shape": {"type": "graph_linear", "slope": 1}})") == "peer_shape");
  CHECK(field_of(R"({"name": "c", "s": 0.5, "shape": {"type": "circle", "R": 1, "foo": 2}})") == "shape.foo");
  CHECK(field_of(R"({"name": "c", "s": 0.5, "shape": {"type": "circle", "R": 1}, "colour": 1})") == "colour");
  CHECK(field_of(R"({"name": "c", "s": 0.5, "shape": {"type": "circle", "R": 1, "M": 100}})") == "shape.M");
  CHECK(field_of(R"({"name": "c", "s": 0.5, "shape": {"type": "circle", "R": 1}, "t_max": -1})") == "t_max");
  CHECK(field_of(R"({"name": "c", "s": 0.5, "shape": {"type": "circle", "R": 1}, "checks": {"nope": 1}})") ==
        "checks.nope");
  CHECK(field_of(R"({"name": "c", "s": 0.5, "shape": {"type": "blob"}})") == "shape.type");
  CHECK(field_of(R"({"s": 0.5, "shape": {"type": "circle", "R": 1}})") == "name");
}

TEST_CASE("parse errors carry the line") {
  try {
    parse_config("{\n  \"name\": \"c\",\n  \"s\": 0.5,,\n}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("presets are valid and named") {
  for (const auto& n : {"shrinking_circle", "nested_disks", "ellipse_convex", "graph_bump", "graph_linear",
                        "star_flower"})
    CHECK_NOTHROW(preset(n));
  for (const auto& n : preset_names()) CHECK(preset(n).name == n);
  CHECK_THROWS_AS(preset("nope"), std::out_of_range);
}

TEST_CASE("seeded perturbations are reproducible") {
  ShapeSpec spec;
  spec.kind = CircleSpec{1.0};
  spec.nodes = 64;
  spec.perturbation = PerturbationSpec{0.05, 5};
  const auto a = std::get<RadialCurve>(build_shape(spec, 3));
  const auto b = std::get<RadialCurve>(build_shape(spec, 3));
  const auto c = std::get<RadialCurve>(build_shape(spec, 4));
  CHECK(std::equal(a.samples().begin(), a.samples().end(), b.samples().begin()));
  CHECK_FALSE(std::equal(a.samples().begin(), a.samples().end(), c.samples().begin()));
}

TEST_CASE("numbers round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) {
    const std::string t = format_number(v);
    double back = 0.0;
    std::from_chars(t.data(), t.data() + t.size(), back);
    CHECK(back == v);
  }
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("plot data") {
  Trajectory empty;
  std::ostringstream e;
  emit_plotdata(empty, e);
  CHECK(e.str() == "# empty trajectory\n");

  const auto r = execute(tiny_circle());
  std::ostringstream p;
  emit_plotdata(r.trajectory, p);
  std::istringstream in(p.str());
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line.rfind("# theta t=0", 0) == 0);
  std::size_t rows = 0;
  std::vector<double> first;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    double theta, v;
    ls >> theta;
    std::vector<double> row;
    while (ls >> v) row.push_back(v);
    if (rows == 0) first = row;
    REQUIRE(row.size() == first.size());
    for (std::size_t k = 0; k < row.size(); ++k) CHECK(row[k] == doctest::Approx(first[k]).epsilon(1e-12));
    ++rows;
  }
  CHECK(rows == 32);
}

TEST_CASE("scenario execution is deterministic and reports checks") {
  const auto a = execute(tiny_circle());
  const auto b = execute(tiny_circle());
  std::ostringstream ca, cb;
  write_timeseries_csv(a, ca);
  write_timeseries_csv(b, cb);
  CHECK(ca.str() == cb.str());
  CHECK(ca.str().rfind("time,step,min_f,max_f,exact_R,hs_min,hs_max,s_perimeter", 0) == 0);
  CHECK(a.passed());
  CHECK(a.checks.size() == 2);

  std::ostringstream j;
  write_trajectory_json(a, j);
  CHECK(j.str().find("\"stop_reason\": \"reached_t_max\"") != std::string::npos);

  auto cfg = tiny_circle();
  cfg.checks = {{"height_v_down", 1e-3}};  // graph-only quantity
  const auto c = execute(cfg);
  CHECK_FALSE(c.passed());
  std::ostringstream summary;
  print_summary(c, summary);
  CHECK(summary.str().find("FAIL") != std::string::npos);
}
