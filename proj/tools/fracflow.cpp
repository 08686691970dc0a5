#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

#include "fracflow/curvature.hpp"
#include "fracflow/scenario.hpp"

namespace {

struct Outcome {
  int status = 0;
  std::string log;
};

Outcome run_one(const fracflow::ScenarioConfig& cfg, const std::string& out_dir) {
  Outcome o;
  std::ostringstream log;
  try {
    o.status = fracflow::run_scenario(cfg, out_dir, log);
  } catch (const std::exception& e) {
    log << "scenario " << cfg.name << ": error: " << e.what() << '\n';
    o.status = 2;
  }
  o.log = log.str();
  return o;
}

// Scenarios are independent; logs are printed in input order.
int run_all(const std::vector<fracflow::ScenarioConfig>& cfgs, const std::string& out_dir, unsigned jobs) {
  std::vector<Outcome> outcomes(cfgs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < cfgs.size();) outcomes[i] = run_one(cfgs[i], out_dir);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < std::min<std::size_t>(jobs, cfgs.size()); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  int status = 0;
  for (const auto& o : outcomes) {
    std::cout << o.log;
    status = std::max(status, o.status);
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional mean curvature flow of planar curves"};
  app.require_subcommand(1);
  unsigned jobs = 1;
  std::string out_dir = "out";
  app.add_option("--jobs,-j", jobs, "Scenarios to run concurrently")->check(CLI::PositiveNumber);
  app.add_option("--out-dir,-o", out_dir, "Directory for output files");

  auto* run = app.add_subcommand("run", "Run a scenario from a JSON config");
  std::vector<std::string> configs;
  run->add_option("config", configs, "Config file(s)")->required()->check(CLI::ExistingFile);

  auto* pre = app.add_subcommand("preset", "Run built-in scenarios");
  std::vector<std::string> names;
  bool list = false;
  pre->add_option("names", names, "Preset names, or 'all'");
  pre->add_flag("--list", list, "List preset names");

  auto* vp = app.add_subcommand("varpi", "Print varpi(s), the curvature of the unit circle");
  double s = 0.5;
  vp->add_option("--s", s, "Fractional order in (0, 1)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*vp) {
      std::cout << fracflow::format_number(fracflow::varpi(fracflow::FractionalOrder(s))) << '\n';
      return 0;
    }
    std::vector<fracflow::ScenarioConfig> cfgs;
    if (*run) {
      for (const auto& c : configs) cfgs.push_back(fracflow::load_config(c));
    } else {
      if (list || names.empty()) {
        for (const auto& n : fracflow::preset_names()) std::cout << n << '\n';
        return 0;
      }
      if (names.size() == 1 && names[0] == "all") names = fracflow::preset_names();
      for (const auto& n : names) cfgs.push_back(fracflow::preset(n));
    }
    return run_all(cfgs, out_dir, jobs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
