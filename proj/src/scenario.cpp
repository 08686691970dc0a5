#include "fracflow/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fracflow {

using nlohmann::json;

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{
      "exact_circle",  "extinction_time", "s_perimeter_down", "perimeter_rate", "hs_min_positive",
      "height_v_down", "vhs_bound",       "star_v_bound",     "star_shaped",    "containment_nonneg",
      "sandwich",      "stationary",      "f5_residual"};
  return names;
}

namespace {

// ---------------------------------------------------------------- parsing

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }
  const json& at(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (v.is_string() && (v == "inf" || v == "infinity")) return std::numeric_limits<double>::infinity();
    if (!v.is_number()) throw ValidationError(field(key), "expected a number");
    return v.get<double>();
  }
  double required_number(const std::string& key) {
    if (!j_.contains(key)) throw ValidationError(field(key), "missing required field");
    return number(key, 0.0);
  }
  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw ValidationError(field(key), "expected a non-negative integer");
    return v.get<std::size_t>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ValidationError(field(key), "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key) {
    if (!has(key)) return {};
    const json& v = j_.at(key);
    if (!v.is_array()) throw ValidationError(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ValidationError(field(key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) throw ValidationError(field(k), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

ShapeSpec parse_shape(const json& j, const std::string& path) {
  Reader r(j, path);
  ShapeSpec spec;
  const std::string type = r.string("type", "");
  if (type == "circle") {
    spec.kind = CircleSpec{r.required_number("R")};
  } else if (type == "ellipse") {
    spec.kind = EllipseSpec{r.required_number("a"), r.required_number("b")};
  } else if (type == "radial_fourier") {
    spec.kind = RadialFourierSpec{r.numbers("cos"), r.numbers("sin")};
  } else if (type == "graph_bump") {
    GraphBumpSpec g;
    g.amplitude = r.number("amplitude", g.amplitude);
    g.width = r.number("width", g.width);
    g.half_width = r.number("L", g.half_width);
    g.nodes = r.count("N", g.nodes);
    spec.kind = g;
  } else if (type == "graph_linear") {
    GraphLinearSpec g;
    g.slope = r.number("slope", g.slope);
    g.intercept = r.number("intercept", g.intercept);
    g.half_width = r.number("L", g.half_width);
    g.nodes = r.count("N", g.nodes);
    spec.kind = g;
  } else {
    throw ValidationError(r.field("type"),
                          "expected one of circle, ellipse, radial_fourier, graph_bump, graph_linear");
  }
  if (spec.radial()) {
    spec.nodes = r.count("M", spec.nodes);
    const auto c = r.numbers("center");
    if (!c.empty()) {
      if (c.size() != 2) throw ValidationError(r.field("center"), "expected [x, y]");
      spec.center = {c[0], c[1]};
    }
    if (r.has("perturbation")) {
      Reader p(r.at("perturbation"), r.field("perturbation"));
      PerturbationSpec ps;
      ps.amplitude = p.number("amplitude", 0.0);
      ps.modes = static_cast<int>(p.count("modes", 0));
      p.finish();
      spec.perturbation = ps;
    }
  }
  r.finish();
  return spec;
}

QuadratureSpec parse_quadrature(const json& j, const std::string& path) {
  Reader r(j, path);
  QuadratureSpec q;
  q.cylinder_radius = r.number("cylinder_radius", q.cylinder_radius);
  q.graded_exponent = r.number("graded_exponent", q.graded_exponent);
  q.near_panels = static_cast<int>(r.count("near_panels", q.near_panels));
  q.far_panels = static_cast<int>(r.count("far_panels", q.far_panels));
  q.max_depth = static_cast<int>(r.count("max_depth", q.max_depth));
  q.abs_tol = r.number("abs_tol", q.abs_tol);
  q.rel_tol = r.number("rel_tol", q.rel_tol);
  q.spectral_tail_tol = r.number("spectral_tail_tol", q.spectral_tail_tol);
  r.finish();
  return q;
}

std::map<std::string, double> default_checks(const ScenarioConfig& cfg) {
  std::map<std::string, double> c;
  if (cfg.shape.radial()) {
    c["s_perimeter_down"] = 1e-8;
    c["star_shaped"] = 0.0;
  } else {
    c["height_v_down"] = 1e-3;
    c["vhs_bound"] = 2.0;
  }
  if (cfg.peer_shape) c["containment_nonneg"] = 1e-3;
  return c;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte points one past the offending character
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string msg = e.what();
    if (const auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw ParseError(msg, line, col);
  }
  Reader r(j, "");
  ScenarioConfig cfg;
  cfg.name = r.string("name", "");
  if (cfg.name.empty()) throw ValidationError("name", "missing required field");
  cfg.s = r.required_number("s");
  if (!r.has("shape")) throw ValidationError("shape", "missing required field");
  cfg.shape = parse_shape(r.at("shape"), "shape");
  if (r.has("peer_shape")) cfg.peer_shape = parse_shape(r.at("peer_shape"), "peer_shape");
  const std::string stepper = r.string("stepper", "rk2");
  if (stepper == "rk2") cfg.stepper = Scheme::rk2;
  else if (stepper == "euler") cfg.stepper = Scheme::euler;
  else throw ValidationError("stepper", "expected euler or rk2");
  cfg.cfl = r.number("cfl", cfg.cfl);
  cfg.t_max = r.number("t_max", cfg.t_max);
  cfg.record_every = r.count("record_every", cfg.record_every);
  cfg.f_floor_fraction = r.number("f_floor_fraction", cfg.f_floor_fraction);
  cfg.blowup_threshold = r.number("blowup_threshold", cfg.blowup_threshold);
  cfg.max_steps = r.count("max_steps", cfg.max_steps);
  if (r.has("quadrature")) cfg.quadrature = parse_quadrature(r.at("quadrature"), "quadrature");
  cfg.seed = r.count("seeds", 0);
  if (r.has("outputs")) {
    const json& o = r.at("outputs");
    if (!o.is_array()) throw ValidationError("outputs", "expected an array");
    cfg.outputs.clear();
    for (const auto& e : o) {
      const std::string v = e.is_string() ? e.get<std::string>() : "";
      if (v == "timeseries_csv") cfg.outputs.push_back(OutputKind::timeseries_csv);
      else if (v == "trajectory_json") cfg.outputs.push_back(OutputKind::trajectory_json);
      else if (v == "plotdata") cfg.outputs.push_back(OutputKind::plotdata);
      else throw ValidationError("outputs", "expected timeseries_csv, trajectory_json or plotdata");
    }
  }
  if (r.has("checks")) {
    const json& c = r.at("checks");
    if (!c.is_object()) throw ValidationError("checks", "expected an object of name: tolerance");
    for (const auto& [k, v] : c.items()) {
      if (!v.is_number()) throw ValidationError("checks." + k, "expected a number");
      cfg.checks[k] = v.get<double>();
    }
  } else {
    cfg.checks = default_checks(cfg);
  }
  if (r.has("star_coefficient")) cfg.star_coefficient = r.number("star_coefficient", 0.0);
  cfg.workers = static_cast<unsigned>(r.count("workers", 1));
  r.finish();
  validate(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

bool power_of_two(std::size_t n) { return n >= 16 && (n & (n - 1)) == 0; }

void validate_shape(const ShapeSpec& spec, const std::string& path) {
  auto positive = [&](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(path + "." + key, "must be positive");
  };
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, CircleSpec>) {
          positive(k.radius, "R");
        } else if constexpr (std::is_same_v<T, EllipseSpec>) {
          positive(k.a, "a");
          positive(k.b, "b");
        } else if constexpr (std::is_same_v<T, RadialFourierSpec>) {
          if (k.cos.empty() || !(k.cos[0] > 0.0)) throw ValidationError(path + ".cos", "cos[0] must be positive");
          double lower = k.cos[0];
          for (std::size_t i = 1; i < k.cos.size(); ++i) lower -= std::abs(k.cos[i]);
          for (std::size_t i = 1; i < k.sin.size(); ++i) lower -= std::abs(k.sin[i]);
          if (!(lower > 0.0)) throw ValidationError(path + ".cos", "radius may become non-positive");
        } else {
          positive(k.half_width, "L");
          if (k.nodes < 16) throw ValidationError(path + ".N", "need at least 16 nodes");
          if constexpr (std::is_same_v<T, GraphBumpSpec>) positive(k.width, "width");
        }
      },
      spec.kind);
  if (spec.radial() && !power_of_two(spec.nodes))
    throw ValidationError(path + ".M", "must be a power of two >= 16");
  if (spec.perturbation && (spec.perturbation->amplitude < 0.0 || spec.perturbation->modes < 0))
    throw ValidationError(path + ".perturbation", "amplitude and modes must be non-negative");
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
  if (cfg.name.empty()) throw ValidationError("name", "must not be empty");
  if (!(cfg.s > 0.0 && cfg.s < 1.0)) throw ValidationError("s", "must lie in the open interval (0, 1)");
  validate_shape(cfg.shape, "shape");
  if (cfg.peer_shape) {
    validate_shape(*cfg.peer_shape, "peer_shape");
    if (cfg.peer_shape->radial() != cfg.shape.radial())
      throw ValidationError("peer_shape", "must be of the same class as shape");
  }
  if (!(cfg.cfl > 0.0)) throw ValidationError("cfl", "must be positive");
  if (!(cfg.t_max > 0.0)) throw ValidationError("t_max", "must be positive");
  if (cfg.record_every < 1) throw ValidationError("record_every", "must be >= 1");
  if (!(cfg.f_floor_fraction > 0.0 && cfg.f_floor_fraction < 1.0))
    throw ValidationError("f_floor_fraction", "must lie in (0, 1)");
  if (!(cfg.blowup_threshold > 0.0)) throw ValidationError("blowup_threshold", "must be positive");
  if (cfg.max_steps < 1) throw ValidationError("max_steps", "must be >= 1");
  if (cfg.workers < 1) throw ValidationError("workers", "must be >= 1");
  try {
    cfg.quadrature.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError("quadrature", e.what());
  }
  const auto& known = check_names();
  for (const auto& [k, v] : cfg.checks) {
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw ValidationError("checks." + k, "unknown check");
    if (!(v >= 0.0)) throw ValidationError("checks." + k, "tolerance must be non-negative");
  }
  if (cfg.star_coefficient && !std::isfinite(*cfg.star_coefficient))
    throw ValidationError("star_coefficient", "must be finite");
}

// ---------------------------------------------------------------- shapes

Shape build_shape(const ShapeSpec& spec, std::uint64_t seed) {
  std::vector<double> pc, ps;  // perturbation modes
  if (spec.perturbation && spec.perturbation->modes >= 2) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int k_max = spec.perturbation->modes;
    pc.assign(k_max + 1, 0.0);
    ps.assign(k_max + 1, 0.0);
    for (int k = 2; k <= k_max; ++k) {
      pc[k] = spec.perturbation->amplitude * u(rng) / (k * k);
      ps[k] = spec.perturbation->amplitude * u(rng) / (k * k);
    }
  }
  auto perturb = [pc, ps](double t) {
    double v = 0.0;
    for (std::size_t k = 2; k < pc.size(); ++k) v += pc[k] * std::cos(k * t) + ps[k] * std::sin(k * t);
    return v;
  };
  return std::visit(
      [&](const auto& k) -> Shape {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, CircleSpec>) {
          if (pc.empty()) return RadialCurve::circle(spec.nodes, k.radius, spec.center);
          return RadialCurve::from_function(
              spec.nodes, [&](double t) { return k.radius * (1.0 + perturb(t)); }, spec.center);
        } else if constexpr (std::is_same_v<T, EllipseSpec>) {
          if (pc.empty()) return RadialCurve::ellipse(spec.nodes, k.a, k.b, spec.center);
          return RadialCurve::from_function(
              spec.nodes,
              [&](double t) {
                const double c = std::cos(t) / k.a, s = std::sin(t) / k.b;
                return (1.0 + perturb(t)) / std::sqrt(c * c + s * s);
              },
              spec.center);
        } else if constexpr (std::is_same_v<T, RadialFourierSpec>) {
          return RadialCurve::from_function(
              spec.nodes,
              [&](double t) {
                double v = k.cos[0];
                for (std::size_t j = 1; j < k.cos.size(); ++j) v += k.cos[j] * std::cos(j * t);
                for (std::size_t j = 1; j < k.sin.size(); ++j) v += k.sin[j] * std::sin(j * t);
                return v * (1.0 + perturb(t));
              },
              spec.center);
        } else if constexpr (std::is_same_v<T, GraphBumpSpec>) {
          return GraphCurve::from_function(k.nodes, k.half_width, [&](double x) {
            const double z = x / k.width;
            return k.amplitude * std::exp(-z * z);
          });
        } else {
          return GraphCurve::from_function(k.nodes, k.half_width,
                                           [&](double x) { return k.intercept + k.slope * x; });
        }
      },
      spec.kind);
}

// ---------------------------------------------------------------- presets

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"shrinking_circle", "nested_disks",  "ellipse_in_disk",
                                              "ellipse_convex",   "perturbed_circle", "graph_bump",
                                              "graph_linear",     "star_flower"};
  return names;
}

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  c.s = 0.5;
  c.outputs = {OutputKind::timeseries_csv, OutputKind::plotdata};
  auto radial = [](auto kind, std::size_t m) {
    ShapeSpec s;
    s.kind = kind;
    s.nodes = m;
    return s;
  };
  if (name == "shrinking_circle") {
    c.shape = radial(CircleSpec{1.0}, 256);
    c.record_every = 20;
    c.checks = {{"exact_circle", 0.01},     {"extinction_time", 0.02}, {"s_perimeter_down", 1e-8},
                {"perimeter_rate", 0.05},   {"sandwich", 0.01},        {"hs_min_positive", 0.0},
                {"star_shaped", 0.0}};
  } else if (name == "nested_disks") {
    c.shape = radial(CircleSpec{0.8}, 128);
    c.peer_shape = radial(CircleSpec{1.2}, 128);
    c.record_every = 20;
    c.checks = {{"containment_nonneg", 1e-3}, {"sandwich", 0.01}};
  } else if (name == "ellipse_in_disk") {
    c.shape = radial(EllipseSpec{1.0, 0.6}, 256);
    c.peer_shape = radial(CircleSpec{1.1}, 256);
    c.record_every = 20;
    c.checks = {{"containment_nonneg", 1e-3}, {"sandwich", 0.01}, {"extinction_time", 0.0}};
  } else if (name == "ellipse_convex") {
    c.shape = radial(EllipseSpec{1.0, 0.5}, 256);
    c.record_every = 20;
    c.f_floor_fraction = 0.1;
    c.checks = {{"hs_min_positive", 0.0}, {"s_perimeter_down", 1e-8}, {"star_shaped", 0.0}};
  } else if (name == "perturbed_circle") {
    c.shape = radial(RadialFourierSpec{{1.0, 0.0, 0.1}, {}}, 256);
    c.shape.perturbation = PerturbationSpec{0.05, 6};
    c.seed = 7;
    c.t_max = 0.12;
    c.record_every = 5;
    c.checks = {{"perimeter_rate", 0.1}, {"s_perimeter_down", 1e-8}, {"f5_residual", 0.05}};
  } else if (name == "graph_bump") {
    ShapeSpec s;
    s.kind = GraphBumpSpec{1.0, 1.0, 10.0, 512};
    c.shape = s;
    c.t_max = 1.0;
    c.record_every = 10;
    c.checks = {{"height_v_down", 1e-3}, {"vhs_bound", 2.0}};
  } else if (name == "graph_linear") {
    ShapeSpec s;
    s.kind = GraphLinearSpec{0.5, 0.0, 10.0, 129};
    c.shape = s;
    c.t_max = 1.0;
    c.record_every = 10;
    c.checks = {{"stationary", 1e-6}, {"height_v_down", 1e-6}};
  } else if (name == "star_flower") {
    c.shape = radial(RadialFourierSpec{{1.0, 0.0, 0.0, 0.0, 0.0, 0.2}, {}}, 256);
    c.record_every = 10;
    c.checks = {{"star_v_bound", 0.0}, {"star_shaped", 0.0}, {"s_perimeter_down", 1e-8}};
  } else {
    throw std::out_of_range("unknown preset '" + name + "'");
  }
  validate(c);
  return c;
}

// ---------------------------------------------------------------- checks

bool ScenarioResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

CheckResult from_monotone(const std::string& name, const MonotoneReport& m) {
  if (m.checked == 0 && m.note.empty()) return {name, false, 0.0, "nothing to compare (too few records)"};
  CheckResult c{name, m.passed, m.margin, ""};
  if (m.first_violation_time) c.detail = "first violation at t=" + fmt(*m.first_violation_time);
  if (!m.note.empty()) c.detail += (c.detail.empty() ? "" : "; ") + m.note;
  if (c.detail.empty()) c.detail = std::to_string(m.checked) + " checks";
  return c;
}

std::optional<double> circle_radius(const ShapeSpec& spec) {
  if (const auto* c = std::get_if<CircleSpec>(&spec.kind); c && !spec.perturbation) return c->radius;
  return std::nullopt;
}

CheckResult evaluate(const std::string& name, double tol, const ScenarioResult& r, FractionalOrder s) {
  const auto& cfg = r.config;
  const auto& tr = r.trajectory;
  CheckOptions opt{tol, cfg.star_coefficient};
  auto monotone = [&](Quantity q, const std::vector<DiagnosticsRecord>& recs) {
    return from_monotone(name, check_monotone(recs, q, s, opt));
  };
  auto needs_radial = [&] {
    if (!cfg.shape.radial()) throw MissingField("check needs a closed curve");
  };

  if (name == "s_perimeter_down") return monotone(Quantity::s_perimeter_down, r.records);
  if (name == "hs_min_positive") return monotone(Quantity::hs_min_positive, r.records);
  if (name == "height_v_down") return monotone(Quantity::height_v_down, r.records);
  if (name == "star_v_bound") return monotone(Quantity::star_v_bound, r.records);
  if (name == "containment_nonneg") return monotone(Quantity::containment_nonneg, r.records);

  if (name == "exact_circle" || name == "extinction_time") {
    const auto r0 = circle_radius(cfg.shape);
    const double w = varpi(s);
    if (name == "extinction_time") {
      // For a circle: |t_stop - Te| / Te <= tol. Otherwise the run must stop
      // no later than the extinction time of the circumscribing disk (+ tol).
      if (tr.stop_reason != StopReason::extinction_imminent)
        return {name, false, -1.0, "run did not stop by extinction (" + std::string(to_string(tr.stop_reason)) + ")"};
      const double t_stop = tr.states.back().time;
      if (r0) {
        const double te = extinction_time(*r0, s, w);
        const double rel = std::abs(t_stop - te) / te;
        return {name, rel <= tol, tol - rel, "t_stop=" + fmt(t_stop) + " Te=" + fmt(te)};
      }
      needs_radial();
      const double rmax = std::get<RadialCurve>(tr.states.front().shape).max_radius();
      const double te = extinction_time(rmax, s, w);
      return {name, t_stop <= te * (1.0 + tol), te * (1.0 + tol) - t_stop,
              "t_stop=" + fmt(t_stop) + " bound=" + fmt(te)};
    }
    if (!r0) throw MissingField("exact_circle needs an unperturbed circle");
    double worst = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < r.records.size(); ++k) {
      const auto& R = r.exact_radius[k];
      if (!R || *R < 0.2 * *r0) continue;
      worst = std::max({worst, std::abs(r.records[k].min_f - *R) / *R, std::abs(r.records[k].max_f - *R) / *R});
      ++n;
    }
    return {name, n > 0 && worst <= tol, tol - worst, "max rel radius error " + fmt(worst) + " over " + std::to_string(n)};
  }
  if (name == "perimeter_rate") {
    const auto rep = perimeter_rate_check(r.records, tol);
    std::string d = "worst mismatch " + fmt(rep.worst_mismatch) + " over " + std::to_string(rep.checked);
    return {name, rep.passed, tol - rep.worst_mismatch, d};
  }
  if (name == "sandwich") {
    needs_radial();
    auto rep = sandwich_check(tr.states, s, varpi(s), tol);
    if (!tr.peer_states.empty()) {
      const auto p = sandwich_check(tr.peer_states, s, varpi(s), tol);
      if (p.worst_violation > rep.worst_violation) rep = p;
    }
    std::string d = "worst relative violation " + fmt(rep.worst_violation);
    if (rep.first_violation_time) d += " at t=" + fmt(*rep.first_violation_time);
    return {name, rep.passed, tol - rep.worst_violation, d};
  }
  if (name == "star_shaped") {
    const bool ok = tr.stop_reason != StopReason::star_shape_lost;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& st : tr.states)
      if (const auto* c = std::get_if<RadialCurve>(&st.shape))
        for (const auto& p : boundary_points(*c)) worst = std::min(worst, dot(p.position - c->center(), p.normal));
    return {name, ok && worst > 0.0, worst, "min x.nu " + fmt(worst)};
  }
  if (name == "vhs_bound") {
    const double v0 = r.records.front().vhs_max.value_or(0.0);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& rec : r.records) {
      if (!rec.vhs_max) throw MissingField("vhs_bound needs a graph");
      worst = std::max(worst, *rec.vhs_max);
    }
    const double bound = tol * std::abs(v0);
    return {name, worst <= bound, bound - worst, "max vH " + fmt(worst) + " vs " + fmt(bound)};
  }
  if (name == "stationary") {
    double worst = 0.0;
    const auto* g0 = std::get_if<GraphCurve>(&tr.states.front().shape);
    for (const auto& st : tr.states) {
      if (const auto* g = std::get_if<GraphCurve>(&st.shape)) {
        for (std::size_t j = 0; j < g->size(); ++j)
          worst = std::max(worst, std::abs(g->heights()[j] - g0->heights()[j]));
      } else {
        const auto& c0 = std::get<RadialCurve>(tr.states.front().shape);
        const auto& c = std::get<RadialCurve>(st.shape);
        for (std::size_t i = 0; i < c.size(); ++i) worst = std::max(worst, std::abs(c.samples()[i] - c0.samples()[i]));
      }
    }
    const bool reached = tr.stop_reason == StopReason::reached_t_max;
    return {name, reached && worst <= tol, tol - worst, "max |u(t) - u(0)| " + fmt(worst)};
  }
  if (name == "f5_residual") {
    double worst = 0.0;
    std::size_t n = 0;
    for (const auto& rec : r.records)
      if (rec.f5_residual_max) {
        worst = std::max(worst, *rec.f5_residual_max);
        ++n;
      }
    return {name, n > 0 && worst <= tol, tol - worst, "max relative residual " + fmt(worst) + " over " + std::to_string(n)};
  }
  throw ValidationError("checks." + name, "unknown check");
}

}  // namespace

ScenarioResult execute(const ScenarioConfig& cfg) {
  validate(cfg);
  const FractionalOrder s(cfg.s);
  ScenarioResult r;
  r.config = cfg;

  FlowConfig fc;
  fc.scheme = cfg.stepper;
  fc.cfl = cfg.cfl;
  fc.t_max = cfg.t_max;
  fc.record_every = cfg.record_every;
  fc.f_floor_fraction = cfg.f_floor_fraction;
  fc.blowup_threshold = cfg.blowup_threshold;
  fc.max_steps = cfg.max_steps;
  fc.workers = cfg.workers;

  std::optional<Shape> peer;
  if (cfg.peer_shape) peer = build_shape(*cfg.peer_shape, cfg.seed + 1);
  r.trajectory = run(build_shape(cfg.shape, cfg.seed), peer, s, fc, cfg.quadrature);

  const bool f5 = cfg.checks.count("f5_residual") > 0;
  r.records = records(r.trajectory, s, f5);
  if (!r.trajectory.peer_states.empty()) {
    Trajectory p;
    p.states = r.trajectory.peer_states;
    r.peer_records = records(p, s, false);
  }
  const auto r0 = circle_radius(cfg.shape);
  for (const auto& rec : r.records) {
    std::optional<double> R;
    if (r0) {
      const double te = extinction_time(*r0, s, varpi(s));
      R = rec.time <= te ? exact_circle(*r0, s, varpi(s), rec.time) : 0.0;
    }
    r.exact_radius.push_back(R);
  }
  for (const auto& [name, tol] : cfg.checks) {
    try {
      r.checks.push_back(evaluate(name, tol, r, s));
    } catch (const Error& e) {
      r.checks.push_back({name, false, 0.0, e.what()});
    }
  }
  return r;
}

int run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  const ScenarioResult r = execute(cfg);
  std::filesystem::create_directories(out_dir);
  auto open = [&](const std::string& suffix) {
    const auto path = out_dir / (cfg.name + suffix);
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    return out;
  };
  for (OutputKind k : cfg.outputs) {
    if (k == OutputKind::timeseries_csv) {
      auto out = open(".csv");
      write_timeseries_csv(r, out);
    } else if (k == OutputKind::trajectory_json) {
      auto out = open(".json");
      write_trajectory_json(r, out);
    } else {
      auto out = open(".plot.dat");
      emit_plotdata(r.trajectory, out);
    }
  }
  print_summary(r, log);
  return r.passed() ? 0 : 1;
}

}  // namespace fracflow
