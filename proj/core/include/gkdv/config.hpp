#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gkdv::config {

enum class Experiment { profiles, reduced, tail, full, shoot, report };
std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

struct GeneralConfig {
  Experiment experiment = Experiment::reduced;
  double beta = 0.4;
  double s0 = 100.0;
  std::uint64_t seed = 1;  // probe jitter only
  std::string output = "gkdv-out";
};

struct ProfilesConfig {
  double y_min = -25.0;
  double y_max = 25.0;
  std::size_t n = 5001;
  double qb_b = 0.01;  // b used for the Q_b column of the profile table
};

struct ReducedConfig {
  double s_end_factor = 100.0;  // integrate over [s0, s_end_factor * s0]
  double tol = 1e-13;
  std::size_t samples = 2001;
};

struct TailConfig {
  double theta = 1.5;
  double x0 = 100.0;
  double t_end = 20.0;
  std::size_t snapshots = 4;
  double x_min = -1024.0;
  double x_max = 1024.0;
  std::size_t n = 16384;
  double cutoff_start = 800.0;
  double cutoff_width = 150.0;
  double cfl = 0.2;
};

struct FullConfig {
  double t_max = 2.0;
  double snapshot_dt = 0.005;
  double lambda_stop_ratio = 0.5;
  double x_min = -540.0;
  double x_max = 612.0;
  std::size_t n = 36864;
  double cutoff_start = 530.0;
  double cutoff_width = 60.0;
  double B = 128.0;
  double weight_h = 0.05;
  double cfl = 0.5;
};

struct ShootConfig {
  std::string model = "reduced";  // reduced | full-pde
  std::size_t budget = 40;
  std::size_t map_n = 21;
  std::size_t per_side = 32;
  double s_max_factor = 0.0;  // 0: 100 (reduced) or 5 (full-pde)
  double tol = 1e-12;
  double jitter = 0.3;  // refinement rectangle edges move inward by up to this fraction
};

struct ReportConfig {
  std::string inputs;  // comma-separated run directories; empty: subdirectories of output
};

struct ExperimentConfig {
  GeneralConfig general;
  ProfilesConfig profiles;
  ReducedConfig reduced;
  TailConfig tail;
  FullConfig full;
  ShootConfig shoot;
  ReportConfig report;

  /// Throws config when a value is outside the range the experiments accept.
  void validate() const;
};

/// INI text with sections [general], [profiles], [reduced], [tail], [full],
/// [shoot], [report]. Unknown sections or keys are errors.
ExperimentConfig parse(std::string_view text);
ExperimentConfig load(const std::filesystem::path& path);
/// Every key, fixed order, numbers in shortest round-trip form.
std::string serialize(const ExperimentConfig& cfg);

/// Dotted keys ("tail.x0"); bare keys resolve to [general].
void set_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);
std::string get_value(const ExperimentConfig& cfg, std::string_view key);
std::vector<std::string> keys();

/// beta, s0, B, x0, resolution -> the dotted key they control for this experiment.
std::string sweep_key(const ExperimentConfig& cfg, std::string_view parameter);

}  // namespace gkdv::config
