#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gkdv/modulation.hpp"
#include "gkdv/pde.hpp"
#include "gkdv/profiles.hpp"
#include "gkdv/reduced.hpp"

namespace gkdv::full {

/// Lab-frame run: composed data Q_b bundle + tail at s0, u and q0 evolved side
/// by side, each snapshot decomposed into (lambda, x, b, p, eps).
struct FullConfig {
  double beta = 0.4;
  double s0 = 10.0;
  /// Defaults are the threshold values s0^{-beta} and beta / s0.
  std::optional<double> lambda0;
  std::optional<double> b0;
  pde::DomainSpec domain{-540.0, 612.0, 36864};
  double cutoff_start = 530.0;
  double cutoff_width = 60.0;
  double B = 128.0;
  double weight_h = 0.05;
  double snapshot_dt = 0.005;
  /// The run ends once lambda <= lambda_stop_ratio * lambda0.
  double lambda_stop_ratio = 0.5;
  double t_max = 2.0;
  double s_max = std::numeric_limits<double>::infinity();
  bool stop_at_exit = false;
  pde::SolverOptions solver{.cfl = 0.5};
  modulation::DecomposeOptions decompose{};
};

enum class FullStatus { completed, exited, truncated };
std::string_view to_string(FullStatus status);

struct FullSample {
  modulation::ModulationState state;
  modulation::NormReport norms;  // NaN when the weight grid does not fit in the box
  double local = 0.0;            // int eps^2 e^{-|y|/10}
  std::array<double, 3> orthogonality{};
  std::size_t iterations = 0;
  pde::ConservedPair conserved;
  double edge_amplitude = 0.0;  // sup |u - q0| within 5% of either end of the box
  reduced::InstabilityCoords coords;
};

struct FullRun {
  FullConfig config;
  reduced::RegimeParams params;
  std::vector<FullSample> samples;
  FullStatus status = FullStatus::completed;
  std::string reason;
  std::optional<FullSample> exit;  // interpolated to H = 1
  double mass_drift = 0.0;         // max relative
  double energy_drift = 0.0;       // max |E - E0| / max(|E0|, 1/2 int u_x^2)
  double tail_mass_drift = 0.0;
  std::size_t steps = 0;
};

FullRun run(const FullConfig& config, const profiles::ProfileSet& profiles,
            const std::function<void(const FullSample&)>& on_sample = {});

/// Residual report of a finished run (needs norms on every sample).
modulation::ResidualReport residuals(const FullRun& run);

}  // namespace gkdv::full
