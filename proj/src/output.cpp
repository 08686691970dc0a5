#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <ostream>

#include <json.hpp>

#include "fracflow/scenario.hpp"

namespace fracflow {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
json number_or_null(const std::optional<double>& v) { return v ? number_or_null(*v) : json(nullptr); }

json state_json(const FlowState& st) {
  json j;
  j["time"] = st.time;
  j["step"] = st.step_count;
  if (const auto* c = std::get_if<RadialCurve>(&st.shape)) {
    j["kind"] = "radial";
    j["center"] = {c->center().x, c->center().y};
    j["f"] = std::vector<double>(c->samples().begin(), c->samples().end());
  } else {
    const auto& g = std::get<GraphCurve>(st.shape);
    j["kind"] = "graph";
    j["L"] = g.half_width();
    j["u"] = std::vector<double>(g.heights().begin(), g.heights().end());
  }
  j["hs"] = st.field.values;
  return j;
}

json record_json(const DiagnosticsRecord& r) {
  json j;
  j["time"] = r.time;
  j["step"] = r.step;
  j["min_f"] = r.min_f;
  j["max_f"] = r.max_f;
  j["hs_min"] = number_or_null(r.hs_min);
  j["hs_max"] = number_or_null(r.hs_max);
  j["s_perimeter"] = number_or_null(r.s_perimeter);
  j["dissipation"] = number_or_null(r.dissipation);
  j["star_v_max"] = number_or_null(r.star_v_max);
  j["height_v_max"] = number_or_null(r.height_v_max);
  j["vhs_max"] = number_or_null(r.vhs_max);
  j["f5_residual_max"] = number_or_null(r.f5_residual_max);
  j["containment_margin"] = number_or_null(r.containment_margin);
  if (r.warning) j["warning"] = r.warning_text;
  return j;
}

}  // namespace

void write_timeseries_csv(const ScenarioResult& r, std::ostream& out) {
  out << "time,step,min_f,max_f,exact_R,hs_min,hs_max,s_perimeter,dissipation,star_v_max,height_v_max,vhs_max,"
         "f5_residual_max,containment_margin\n";
  for (std::size_t k = 0; k < r.records.size(); ++k) {
    const auto& d = r.records[k];
    const std::string exact = k < r.exact_radius.size() ? opt(r.exact_radius[k]) : "";
    out << format_number(d.time) << ',' << d.step << ',' << format_number(d.min_f) << ',' << format_number(d.max_f)
        << ',' << exact << ',' << format_number(d.hs_min) << ',' << format_number(d.hs_max) << ','
        << opt(d.s_perimeter) << ',' << opt(d.dissipation) << ',' << opt(d.star_v_max) << ','
        << opt(d.height_v_max) << ',' << opt(d.vhs_max) << ',' << opt(d.f5_residual_max) << ','
        << opt(d.containment_margin) << '\n';
  }
}

void write_trajectory_json(const ScenarioResult& r, std::ostream& out) {
  json j;
  j["name"] = r.config.name;
  j["s"] = r.config.s;
  j["stop_reason"] = std::string(to_string(r.trajectory.stop_reason));
  j["stop_detail"] = r.trajectory.stop_detail;
  j["states"] = json::array();
  for (const auto& st : r.trajectory.states) j["states"].push_back(state_json(st));
  if (!r.trajectory.peer_states.empty()) {
    j["peer_states"] = json::array();
    for (const auto& st : r.trajectory.peer_states) j["peer_states"].push_back(state_json(st));
  }
  j["records"] = json::array();
  for (const auto& d : r.records) j["records"].push_back(record_json(d));
  j["checks"] = json::array();
  for (const auto& c : r.checks)
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"margin", number_or_null(c.margin)},
                           {"detail", c.detail}});
  out << j.dump(1) << '\n';
}

void emit_plotdata(const Trajectory& tr, std::ostream& out) {
  if (tr.states.empty()) {
    out << "# empty trajectory\n";
    return;
  }
  const bool radial = std::holds_alternative<RadialCurve>(tr.states.front().shape);
  out << "# column 1: " << (radial ? "theta" : "x") << "; columns 2..: " << (radial ? "f" : "u")
      << " at the recorded times\n# " << (radial ? "theta" : "x");
  for (const auto& st : tr.states) out << " t=" << format_number(st.time);
  out << '\n';
  const std::size_t n = node_count(tr.states.front().shape);
  for (std::size_t i = 0; i < n; ++i) {
    if (radial) out << format_number(std::get<RadialCurve>(tr.states.front().shape).theta(i));
    else out << format_number(std::get<GraphCurve>(tr.states.front().shape).x(i));
    for (const auto& st : tr.states) {
      if (const auto* c = std::get_if<RadialCurve>(&st.shape)) out << ' ' << format_number(c->samples()[i]);
      else out << ' ' << format_number(std::get<GraphCurve>(st.shape).heights()[i]);
    }
    out << '\n';
  }
}

void emit_plotdata(const Trajectory& tr, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  emit_plotdata(tr, out);
}

void print_summary(const ScenarioResult& r, std::ostream& out) {
  const auto& tr = r.trajectory;
  out << "scenario " << r.config.name << ": stop=" << to_string(tr.stop_reason);
  if (!tr.stop_detail.empty()) out << " (" << tr.stop_detail << ")";
  if (!tr.states.empty())
    out << " t=" << format_number(tr.states.back().time) << " steps=" << tr.states.back().step_count;
  out << '\n';
  out << "  " << std::left << std::setw(20) << "check" << std::setw(8) << "result" << std::setw(14) << "margin"
      << "detail\n";
  for (const auto& c : r.checks) {
    std::ostringstream m;
    m.precision(4);
    m << c.margin;
    out << "  " << std::setw(20) << c.name << std::setw(8) << (c.passed ? "PASS" : "FAIL") << std::setw(14)
        << m.str() << c.detail << '\n';
  }
  out << std::right;
}

}  // namespace fracflow
