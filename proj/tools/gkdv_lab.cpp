#include <fmt/format.h>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gkdv/config.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/experiments.hpp"

namespace {

constexpr int usage_error = 2;

void print(const gkdv::experiments::RunManifest& m) {
  fmt::print("{} -> {}  [{:.1f} s]\n", m.experiment, m.directory.generic_string(), m.wall_seconds);
  for (const auto& c : m.criteria) {
    fmt::print("  {} {}: {} {} {}\n", c.passed ? "PASS" : "FAIL", c.name, gkdv::io::format_double(c.measured),
               c.relation, gkdv::io::format_double(c.threshold));
  }
  if (!m.error.empty()) fmt::print("  ERROR {}\n", m.error);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for tail-driven blow-up of critical gKdV"};
  std::string experiment;
  std::string config_path;
  std::string out;
  std::size_t workers = 1;
  std::vector<std::string> sets;
  std::string sweep;
  app.add_option("experiment", experiment, "profiles | reduced | tail | full | shoot | report")->required();
  app.add_option("--config", config_path, "INI configuration file")->required();
  app.add_option("--out", out, "output directory (overrides general.output)");
  app.add_option("--workers", workers, "worker threads for shooting runs and sweep members")
      ->check(CLI::Range(std::size_t{1}, std::size_t{256}));
  app.add_option("--set", sets, "override a configuration value, key=value (repeatable)");
  app.add_option("--sweep", sweep, "parameter=v1,v2,... (beta, s0, B, x0, resolution)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : usage_error;
  }

  gkdv::config::ExperimentConfig cfg;
  std::string sweep_param;
  std::vector<std::string> sweep_values;
  try {
    cfg = gkdv::config::load(config_path);
    cfg.general.experiment = gkdv::config::parse_experiment(experiment);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      gkdv::require(eq != std::string::npos, gkdv::ErrorCode::config, fmt::format("--set expects key=value, got '{}'", s));
      gkdv::config::set_value(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (!out.empty()) cfg.general.output = out;
    cfg.validate();
    if (!sweep.empty()) {
      const auto eq = sweep.find('=');
      gkdv::require(eq != std::string::npos, gkdv::ErrorCode::config,
                    fmt::format("--sweep expects parameter=v1,v2,..., got '{}'", sweep));
      sweep_param = sweep.substr(0, eq);
      std::string rest = sweep.substr(eq + 1);
      std::size_t pos = 0;
      while (pos < rest.size()) {
        const auto comma = rest.find(',', pos);
        const auto item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!item.empty()) sweep_values.push_back(item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      gkdv::config::sweep_key(cfg, sweep_param);
    }
  } catch (const gkdv::Error& e) {
    fmt::print(stderr, "gkdv-lab: {}\n", e.what());
    return usage_error;
  }

  try {
    if (!sweep_param.empty()) {
      const auto runs = gkdv::experiments::sweep(cfg, sweep_param, sweep_values, workers);
      for (const auto& m : runs) print(m);
      fmt::print("sweep of {} over {} values: {}\n", sweep_param, runs.size(),
                 gkdv::experiments::exit_code(runs) == 0 ? "pass" : "fail");
      return gkdv::experiments::exit_code(runs);
    }
    const auto m = gkdv::experiments::run(cfg, workers);
    print(m);
    return gkdv::experiments::exit_code(m);
  } catch (const gkdv::Error& e) {
    fmt::print(stderr, "gkdv-lab: {}\n", e.what());
    return e.code() == gkdv::ErrorCode::config ? usage_error : 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "gkdv-lab: unexpected failure: {}\n", e.what());
    return 1;
  }
}
