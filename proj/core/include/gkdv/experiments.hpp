#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "gkdv/config.hpp"
#include "gkdv/io.hpp"

namespace gkdv::experiments {

struct Criterion {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<", "<=", ">=", "in [a, b]", "=="
  std::string detail;
};

struct Measurement {
  std::string name;
  double value = 0.0;
};

struct RunManifest {
  std::string experiment;
  std::string config_text;  // serialized configuration snapshot
  std::string version;
  std::filesystem::path directory;
  double wall_seconds = 0.0;
  std::vector<Criterion> criteria;
  std::vector<Measurement> measurements;
  /// Every file in the run directory except manifest.json itself.
  std::vector<io::FileEntry> files;
  std::string error;  // non-empty when the experiment aborted

  bool passed() const;
};

inline constexpr std::string_view manifest_name = "manifest.json";

std::string_view version();

/// Runs the experiment named in the configuration inside general.output and
/// writes its CSV/JSON artifacts, a plotting script and manifest.json.
/// Library failures during the run are recorded in the manifest, not thrown.
/// `workers` bounds the threads used by the shooting experiment.
RunManifest run(const config::ExperimentConfig& cfg, std::size_t workers = 1);

/// One run per value in general.output/<parameter>-<value>, at most `workers`
/// at a time, plus sweep.csv and sweep_manifest.json in general.output.
/// Per-run failures are recorded and the sweep continues.
std::vector<RunManifest> sweep(const config::ExperimentConfig& cfg, std::string_view parameter,
                               const std::vector<std::string>& values, std::size_t workers = 1);

std::string manifest_json(const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

/// Exit status of the CLI: 0 when every criterion passed, 1 otherwise.
int exit_code(const RunManifest& manifest);
int exit_code(const std::vector<RunManifest>& manifests);

}  // namespace gkdv::experiments
