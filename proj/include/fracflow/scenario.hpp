#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fracflow/curvature.hpp"
#include "fracflow/diagnostics.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/flow.hpp"

namespace fracflow {

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct CircleSpec {
  double radius = 1.0;
};
struct EllipseSpec {
  double a = 1.0;
  double b = 1.0;
};
/// f = cos[0] + sum_k cos[k] cos(k theta) + sin[k] sin(k theta).
struct RadialFourierSpec {
  std::vector<double> cos;
  std::vector<double> sin;
};
/// u = amplitude exp(-(x / width)^2) on [-L, L].
struct GraphBumpSpec {
  double amplitude = 1.0;
  double width = 1.0;
  double half_width = 10.0;
  std::size_t nodes = 512;
};
struct GraphLinearSpec {
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 10.0;
  std::size_t nodes = 129;
};

/// Seeded random low-mode perturbation of a radial shape: coefficients
/// uniform in [-amplitude, amplitude] / k^2 for 2 <= k <= modes.
struct PerturbationSpec {
  double amplitude = 0.0;
  int modes = 0;
};

struct ShapeSpec {
  std::variant<CircleSpec, EllipseSpec, RadialFourierSpec, GraphBumpSpec, GraphLinearSpec> kind;
  std::size_t nodes = 256;  // radial shapes only
  Vec2 center{};
  std::optional<PerturbationSpec> perturbation;

  bool radial() const noexcept { return kind.index() <= 2; }
};

enum class OutputKind { timeseries_csv, trajectory_json, plotdata };

struct ScenarioConfig {
  std::string name;
  double s = 0.5;
  ShapeSpec shape;
  std::optional<ShapeSpec> peer_shape;
  Scheme stepper = Scheme::rk2;
  double cfl = 0.5;
  double t_max = std::numeric_limits<double>::infinity();
  std::size_t record_every = 10;
  double f_floor_fraction = 0.05;
  double blowup_threshold = 1e6;
  std::size_t max_steps = 200000;
  QuadratureSpec quadrature;
  std::uint64_t seed = 0;
  std::vector<OutputKind> outputs{OutputKind::timeseries_csv};
  /// Enabled checks and their tolerances; see check_names().
  std::map<std::string, double> checks;
  std::optional<double> star_coefficient;
  unsigned workers = 1;
};

/// Names accepted in the `checks` object.
const std::vector<std::string>& check_names();

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
/// Throws ValidationError naming the offending field.
void validate(const ScenarioConfig& cfg);

Shape build_shape(const ShapeSpec& spec, std::uint64_t seed);

const std::vector<std::string>& preset_names();
/// Throws std::out_of_range for unknown names.
ScenarioConfig preset(const std::string& name);

struct CheckResult {
  std::string name;
  bool passed = false;
  double margin = 0.0;  // slack; negative on failure
  std::string detail;
};

struct ScenarioResult {
  ScenarioConfig config;
  Trajectory trajectory;
  std::vector<DiagnosticsRecord> records;
  std::vector<DiagnosticsRecord> peer_records;
  std::vector<std::optional<double>> exact_radius;  // per record, circles only
  std::vector<CheckResult> checks;

  bool passed() const;
};

/// Runs the flow and evaluates the enabled checks; no I/O.
ScenarioResult execute(const ScenarioConfig& cfg);

/// Writes the requested outputs into `out_dir`, prints the summary table to
/// `log` and returns 0 iff every check passed.
int run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

// Output writers. Numbers use shortest round-trip formatting.
std::string format_number(double v);
void write_timeseries_csv(const ScenarioResult& r, std::ostream& out);
void write_trajectory_json(const ScenarioResult& r, std::ostream& out);
void emit_plotdata(const Trajectory& tr, std::ostream& out);
void emit_plotdata(const Trajectory& tr, const std::filesystem::path& path);
void print_summary(const ScenarioResult& r, std::ostream& out);

}  // namespace fracflow
