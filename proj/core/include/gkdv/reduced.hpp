#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gkdv::reduced {

/// Upper end of the admissible blow-up parameter range.
inline constexpr double beta_max = 11.0 / 20.0;

/// Tail-forced regime: the tail exponent theta and amplitude c0 are tied to
/// beta so that lambda = s^{-beta} is an exact solution.
struct RegimeParams {
  double beta = 0.5;
  double theta = 1.5;
  double c0 = 0.0;
  double intQ = 0.0;
  double s0 = 100.0;

  /// Coefficient 4 c0 / int Q of the forcing term.
  double forcing() const { return 4.0 * c0 / intQ; }
};

double theta_of_beta(double beta);
double beta_of_theta(double theta);
/// c0 = -(int Q / 2) (theta - 1) (2 theta - 1)^{theta - 1}.
double threshold_c0(double theta, double intQ);

RegimeParams params_from_beta(double beta, double intQ, double s0);

struct ReducedState {
  double s = 0.0;
  double lambda = 1.0;
  double x = 1.0;
  double b = 0.0;
};

struct StateDerivative {
  double lambda_s = 0.0;
  double x_s = 0.0;
  double b_s = 0.0;
};

/// x(s0) on the threshold solution: s0^{1-beta} / (1 - beta).
double threshold_x(double beta, double s);

/// lambda = s^{-beta}, x = s^{1-beta}/(1-beta), b = beta/s.
ReducedState exact_solution(const RegimeParams& params, double s);

/// lambda_s = -b lambda, x_s = lambda, and b_s from d/ds of
/// g = b/lambda^2 + (4 c0/int Q) lambda^{-3/2} x^{-theta} set to zero.
StateDerivative rhs(const ReducedState& state, const RegimeParams& params);

struct InstabilityCoords {
  double g = 0.0;
  double f = 0.0;
  double F = 0.0;
  double G = 0.0;
  double H = 0.0;
};

InstabilityCoords instability_coords(const ReducedState& state, const RegimeParams& params);

struct TrajectorySample {
  ReducedState state;
  double t = 0.0;  // original time, t(s0) = 0
  InstabilityCoords coords;
};

enum class TrajectoryStatus { completed, exited, halted };
std::string_view to_string(TrajectoryStatus status);

struct ReducedTrajectory {
  RegimeParams params;
  std::vector<TrajectorySample> samples;
  TrajectoryStatus status = TrajectoryStatus::completed;
  std::string halt_reason;
  std::optional<TrajectorySample> exit;  // set when H reached 1
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

struct IntegrateOptions {
  std::size_t samples = 401;     // output points, log-spaced in s, both ends included
  bool stop_at_exit = false;     // stop when H = F^2 + G^2 reaches 1
  double exit_tolerance = 1e-10; // bisection width in s for the exit event
  double min_step = 1e-12;       // relative to s
};

/// Adaptive Dormand-Prince 5(4) integration in s of (lambda, x, b, t) with
/// t_s = lambda^3. Steps land exactly on the output points.
ReducedTrajectory integrate(const ReducedState& initial, const RegimeParams& params, double s_end, double tol,
                            const IntegrateOptions& options = {});

struct TimeSample {
  double t = 0.0;
  double lambda = 0.0;
};

/// (t, lambda) pairs; t(s) = int_{s0}^{s} lambda^3 is carried as an extra
/// integrated component, so its accuracy matches the integrator.
std::vector<TimeSample> convert_time(const ReducedTrajectory& traj);

/// Samples used for rate fits: the last decade of s before the end (or exit),
/// excluding the first 20% of the run.
std::vector<TimeSample> fit_window(const ReducedTrajectory& traj);

enum class Regime { finite_time_blowup, exponential_growup, power_growup };
std::string_view to_string(Regime regime);

struct RegimeReport {
  Regime regime = Regime::finite_time_blowup;
  std::optional<double> predicted_exponent;
  double fitted_exponent = 0.0;
  /// Blow-up time T (finite time), decay rate (exponential) or time origin (power).
  double T_or_rate = 0.0;
  double fit_rms = 0.0;
  std::size_t samples_used = 0;
};

/// beta > 1/3: finite time with nu = beta/(3 beta - 1); beta = 1/3: exponential
/// with lambda ~ e^{-t/3}; beta < 1/3: power grow-up with nu = beta/(1 - 3 beta).
RegimeReport classify_regime(double beta);

/// Least-squares fit of lambda(t) in the regime of the skeleton. Power laws are
/// fitted with a free time origin (T for blow-up), chosen by a 1-D search.
RegimeReport fit_exponent(std::span<const TimeSample> series, const RegimeReport& skeleton);

}  // namespace gkdv::reduced
