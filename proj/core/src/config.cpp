#include "gkdv/config.hpp"

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "gkdv/errors.hpp"
#include "gkdv/io.hpp"

namespace gkdv::config {

namespace {

struct Entry {
  std::string section;
  std::string name;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;

  std::string key() const { return section + "." + name; }
};

std::uint64_t parse_unsigned(std::string_view t) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  require(!t.empty() && ec == std::errc{} && ptr == t.data() + t.size(), ErrorCode::config,
          fmt::format("not a non-negative integer: '{}'", t));
  return v;
}

std::string trim(std::string_view t) {
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
  return std::string(t);
}

template <typename S, typename T>
Entry entry(std::string section, std::string name, S ExperimentConfig::*sec, T S::*mem) {
  Entry e{std::move(section), std::move(name), {}, {}};
  e.get = [sec, mem](const ExperimentConfig& c) -> std::string {
    const T& v = c.*sec.*mem;
    if constexpr (std::is_same_v<T, double>) {
      return io::format_double(v);
    } else if constexpr (std::is_same_v<T, std::string>) {
      return v;
    } else if constexpr (std::is_same_v<T, Experiment>) {
      return std::string(to_string(v));
    } else {
      return std::to_string(v);
    }
  };
  e.set = [sec, mem](ExperimentConfig& c, std::string_view text) {
    T& v = c.*sec.*mem;
    const std::string t = trim(text);
    if constexpr (std::is_same_v<T, double>) {
      v = io::parse_double(t);
    } else if constexpr (std::is_same_v<T, std::string>) {
      v = t;
    } else if constexpr (std::is_same_v<T, Experiment>) {
      v = parse_experiment(t);
    } else {
      v = static_cast<T>(parse_unsigned(t));
    }
  };
  return e;
}

const std::vector<Entry>& table() {
  using C = ExperimentConfig;
  static const std::vector<Entry> t = {
      entry("general", "experiment", &C::general, &GeneralConfig::experiment),
      entry("general", "beta", &C::general, &GeneralConfig::beta),
      entry("general", "s0", &C::general, &GeneralConfig::s0),
      entry("general", "seed", &C::general, &GeneralConfig::seed),
      entry("general", "output", &C::general, &GeneralConfig::output),
      entry("profiles", "y_min", &C::profiles, &ProfilesConfig::y_min),
      entry("profiles", "y_max", &C::profiles, &ProfilesConfig::y_max),
      entry("profiles", "n", &C::profiles, &ProfilesConfig::n),
      entry("profiles", "qb_b", &C::profiles, &ProfilesConfig::qb_b),
      entry("reduced", "s_end_factor", &C::reduced, &ReducedConfig::s_end_factor),
      entry("reduced", "tol", &C::reduced, &ReducedConfig::tol),
      entry("reduced", "samples", &C::reduced, &ReducedConfig::samples),
      entry("tail", "theta", &C::tail, &TailConfig::theta),
      entry("tail", "x0", &C::tail, &TailConfig::x0),
      entry("tail", "t_end", &C::tail, &TailConfig::t_end),
      entry("tail", "snapshots", &C::tail, &TailConfig::snapshots),
      entry("tail", "x_min", &C::tail, &TailConfig::x_min),
      entry("tail", "x_max", &C::tail, &TailConfig::x_max),
      entry("tail", "n", &C::tail, &TailConfig::n),
      entry("tail", "cutoff_start", &C::tail, &TailConfig::cutoff_start),
      entry("tail", "cutoff_width", &C::tail, &TailConfig::cutoff_width),
      entry("tail", "cfl", &C::tail, &TailConfig::cfl),
      entry("full", "t_max", &C::full, &FullConfig::t_max),
      entry("full", "snapshot_dt", &C::full, &FullConfig::snapshot_dt),
      entry("full", "lambda_stop_ratio", &C::full, &FullConfig::lambda_stop_ratio),
      entry("full", "x_min", &C::full, &FullConfig::x_min),
      entry("full", "x_max", &C::full, &FullConfig::x_max),
      entry("full", "n", &C::full, &FullConfig::n),
      entry("full", "cutoff_start", &C::full, &FullConfig::cutoff_start),
      entry("full", "cutoff_width", &C::full, &FullConfig::cutoff_width),
      entry("full", "B", &C::full, &FullConfig::B),
      entry("full", "weight_h", &C::full, &FullConfig::weight_h),
      entry("full", "cfl", &C::full, &FullConfig::cfl),
      entry("shoot", "model", &C::shoot, &ShootConfig::model),
      entry("shoot", "budget", &C::shoot, &ShootConfig::budget),
      entry("shoot", "map_n", &C::shoot, &ShootConfig::map_n),
      entry("shoot", "per_side", &C::shoot, &ShootConfig::per_side),
      entry("shoot", "s_max_factor", &C::shoot, &ShootConfig::s_max_factor),
      entry("shoot", "tol", &C::shoot, &ShootConfig::tol),
      entry("shoot", "jitter", &C::shoot, &ShootConfig::jitter),
      entry("report", "inputs", &C::report, &ReportConfig::inputs),
  };
  return t;
}

const Entry& find(std::string_view key) {
  const std::string full = key.find('.') == std::string_view::npos ? "general." + std::string(key) : std::string(key);
  for (const auto& e : table()) {
    if (e.key() == full) return e;
  }
  fail(ErrorCode::config, fmt::format("unknown configuration key '{}'", key));
}

void check(bool ok, const std::string& what) { require(ok, ErrorCode::config, what); }

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::profiles: return "profiles";
    case Experiment::reduced: return "reduced";
    case Experiment::tail: return "tail";
    case Experiment::full: return "full";
    case Experiment::shoot: return "shoot";
    case Experiment::report: return "report";
  }
  return "unknown";
}

Experiment parse_experiment(std::string_view name) {
  for (auto e : {Experiment::profiles, Experiment::reduced, Experiment::tail, Experiment::full, Experiment::shoot,
                 Experiment::report}) {
    if (to_string(e) == name) return e;
  }
  fail(ErrorCode::config, fmt::format("unknown experiment '{}'", name));
}

void ExperimentConfig::validate() const {
  check(std::isfinite(general.beta) && general.beta > 0.0 && general.beta < 11.0 / 20.0,
        fmt::format("general.beta = {} must lie in (0, 11/20)", general.beta));
  check(positive(general.s0), "general.s0 must be positive");
  check(!general.output.empty(), "general.output must not be empty");
  check(profiles.y_min < 0.0 && profiles.y_max > 0.0 && profiles.n >= 16, "profiles grid must straddle 0 with n >= 16");
  check(profiles.qb_b > 0.0 && profiles.qb_b < 0.1, "profiles.qb_b must lie in (0, 0.1)");
  check(reduced.s_end_factor > 1.0 && std::isfinite(reduced.s_end_factor), "reduced.s_end_factor must exceed 1");
  check(positive(reduced.tol) && reduced.tol < 1e-3, "reduced.tol must lie in (0, 1e-3)");
  check(reduced.samples >= 2, "reduced.samples must be at least 2");
  check(tail.theta > 1.0 && tail.theta < 29.0 / 18.0, "tail.theta must lie in (1, 29/18)");
  check(positive(tail.x0) && positive(tail.t_end), "tail.x0 and tail.t_end must be positive");
  check(tail.snapshots >= 1, "tail.snapshots must be at least 1");
  check(tail.x_min < tail.x_max && tail.n >= 16, "tail domain is empty");
  check(positive(tail.cutoff_width) && positive(tail.cfl), "tail.cutoff_width and tail.cfl must be positive");
  check(positive(full.t_max) && positive(full.snapshot_dt), "full.t_max and full.snapshot_dt must be positive");
  check(full.lambda_stop_ratio > 0.0 && full.lambda_stop_ratio < 1.0, "full.lambda_stop_ratio must lie in (0, 1)");
  check(full.x_min < full.x_max && full.n >= 16, "full domain is empty");
  check(full.B > 100.0, "full.B must exceed 100");
  check(positive(full.weight_h) && positive(full.cfl) && positive(full.cutoff_width),
        "full.weight_h, full.cfl and full.cutoff_width must be positive");
  check(shoot.model == "reduced" || shoot.model == "full-pde", "shoot.model must be reduced or full-pde");
  check(shoot.budget >= 9, "shoot.budget must be at least 9");
  check(shoot.map_n >= 2 && shoot.per_side >= 2, "shoot.map_n and shoot.per_side must be at least 2");
  check(shoot.s_max_factor == 0.0 || shoot.s_max_factor > 1.0, "shoot.s_max_factor must be 0 or exceed 1");
  check(positive(shoot.tol), "shoot.tol must be positive");
  check(shoot.jitter >= 0.0 && shoot.jitter < 1.0, "shoot.jitter must lie in [0, 1)");
}

ExperimentConfig parse(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::config, fmt::format("malformed configuration: {}", e.message()));
  }
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    require(!body.empty() || body.data().empty(), ErrorCode::config,
            fmt::format("key '{}' outside any section", section));
    for (const auto& [name, value] : body) {
      find(section + "." + name).set(cfg, value.data());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const Error& e) {
    fail(ErrorCode::config, e.what());
  }
  return parse(text);
}

std::string serialize(const ExperimentConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& e : table()) {
    if (e.section != section) {
      if (!section.empty()) out += '\n';
      section = e.section;
      out += fmt::format("[{}]\n", section);
    }
    out += fmt::format("{} = {}\n", e.name, e.get(cfg));
  }
  return out;
}

void set_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) { find(key).set(cfg, value); }

std::string get_value(const ExperimentConfig& cfg, std::string_view key) { return find(key).get(cfg); }

std::vector<std::string> keys() {
  std::vector<std::string> out;
  for (const auto& e : table()) out.push_back(e.key());
  return out;
}

std::string sweep_key(const ExperimentConfig& cfg, std::string_view parameter) {
  if (parameter == "beta") return "general.beta";
  if (parameter == "s0") return "general.s0";
  if (parameter == "B") return "full.B";
  if (parameter == "x0") return "tail.x0";
  if (parameter == "resolution") {
    switch (cfg.general.experiment) {
      case Experiment::profiles: return "profiles.n";
      case Experiment::tail: return "tail.n";
      case Experiment::full: return "full.n";
      default: break;
    }
    fail(ErrorCode::config,
         fmt::format("resolution is not sweepable for experiment '{}'", to_string(cfg.general.experiment)));
  }
  fail(ErrorCode::config, fmt::format("'{}' is not sweepable (beta, s0, B, x0, resolution)", parameter));
}

}  // namespace gkdv::config
