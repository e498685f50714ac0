#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/grid.hpp"
#include "gkdv/profiles.hpp"

namespace gkdv::pde {

/// Periodic box [x_min, x_max) with n nodes x_j = x_min + j dx. Data that must
/// vanish at infinity is compactified by a smooth right cutoff (see TailSpec).
struct DomainSpec {
  double x_min = -1024.0;
  double x_max = 1024.0;
  std::size_t n = 16384;

  double length() const { return x_max - x_min; }
  double dx() const { return length() / static_cast<double>(n); }
  double node(std::size_t j) const { return x_min + dx() * static_cast<double>(j); }
  /// n even, at least 16, with no prime factor above 7.
  void validate() const;
  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

/// Samples of u(t, .) on a DomainSpec.
class Field {
 public:
  Field() = default;
  Field(double t, DomainSpec domain, std::vector<double> values);
  static Field zeros(double t, const DomainSpec& domain);
  static Field sample(double t, const DomainSpec& domain, const std::function<double(double)>& f);

  double t() const { return t_; }
  const DomainSpec& domain() const { return domain_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  double x(std::size_t j) const { return domain_.node(j); }
  double sup_norm() const;
  Field negated() const;

 private:
  double t_ = 0.0;
  DomainSpec domain_{};
  std::vector<double> values_;
};

Field operator-(const Field& a, const Field& b);
Field operator+(const Field& a, const Field& b);

/// f0(x) = c0 x^{-theta} S((x - x0/4)/(x0/4)) (1 - S((x - cutoff_start)/cutoff_width)),
/// with S the C-infinity step. Zero for x < x0/4, pure power law on
/// [x0/2, cutoff_start], zero beyond cutoff_start + cutoff_width.
struct TailSpec {
  double c0 = -1.0;
  double theta = 1.5;
  double x0 = 100.0;
  double cutoff_start = 800.0;
  double cutoff_width = 150.0;

  void validate() const;
  double value(double x) const;
  /// True where f0 coincides with c0 x^{-theta}.
  bool in_power_zone(double x) const { return x >= 0.5 * x0 && x <= cutoff_start; }
};

Field build_tail(const TailSpec& tail, const DomainSpec& domain, double t = 0.0);

struct ConservedPair {
  double mass = 0.0;
  double energy = 0.0;
  double kinetic = 0.0;  // 1/2 int u_x^2, the scale for energy drift since E(Q) = 0
};

/// M = int u^2 (Parseval) and E = 1/2 int u_x^2 - 1/6 int u^6 (spectral
/// derivative, u^6 integrated on a threefold refined grid).
ConservedPair conserved(const Field& field);

struct SolverOptions {
  double dt_max = 0.01;
  /// dt <= cfl / (k_max * max(1, 5 sup|u|^4)).
  double cfl = 0.2;
  double dt_min = 1e-9;
  /// sup|u| above this value is reported as blow-up.
  double blowup_amplitude = 1e3;
  /// Damping rate exp(-sigma(x) dt) applied in edge layers of the given
  /// width at both ends. Zero disables the sponge.
  double sponge_strength = 0.0;
  double sponge_width = 0.0;
  int contour_points = 32;
};

struct Snapshot {
  Field field;
  ConservedPair conserved;
};

/// Thrown when the solution stops being finite or exceeds the blow-up amplitude.
class BlowUpDetected : public Error {
 public:
  BlowUpDetected(const std::string& what, Field last_valid)
      : Error(ErrorCode::blow_up_detected, what), last_(std::move(last_valid)) {}
  const Field& last_valid() const { return last_; }

 private:
  Field last_;
};

/// Fourier pseudo-spectral gKdV solver, u_t + (u_xx + u^5)_x = 0, with
/// threefold zero padding for u^5 and ETDRK4 time stepping (phi-functions by
/// contour averages).
class GkdvSolver {
 public:
  explicit GkdvSolver(DomainSpec domain, SolverOptions options = {});
  ~GkdvSolver();
  GkdvSolver(GkdvSolver&&) noexcept;
  GkdvSolver& operator=(GkdvSolver&&) noexcept;

  const DomainSpec& domain() const { return domain_; }
  const SolverOptions& options() const { return options_; }

  /// One ETDRK4 step of size dt.
  Field step(const Field& field, double dt);
  /// Steps to t_target with equal steps no longer than the stability bound
  /// computed from the starting amplitude (or dt_fixed if positive).
  Field advance(const Field& field, double t_target, double dt_fixed = 0.0);
  /// Snapshots at field.t + k * snapshot_every up to t_end (inclusive), the
  /// initial state first. The callback may stop the run by returning false.
  void evolve(const Field& field, double t_end, double snapshot_every,
              const std::function<bool(const Snapshot&)>& on_snapshot, double dt_fixed = 0.0);
  std::vector<Snapshot> evolve(const Field& field, double t_end, double snapshot_every, double dt_fixed = 0.0);

  /// Stable step for the given field.
  double stable_dt(const Field& field) const;
  std::size_t steps_taken() const { return steps_; }

 private:
  struct Impl;
  DomainSpec domain_;
  SolverOptions options_;
  std::unique_ptr<Impl> impl_;
  std::size_t steps_ = 0;
};

struct TailDecayReport {
  double slope = 0.0;
  double intercept = 0.0;
  double fit_rms = 0.0;
  std::size_t points_used = 0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double max_difference = 0.0;  // sup |q0 - f0| over the fit region
  double min_ratio = 0.0;       // q0/f0 range over the fit region
  double max_ratio = 0.0;
};

struct TailDecayOptions {
  /// Upper end of the trusted region; NaN means cutoff_start / 2.
  double x_hi = std::numeric_limits<double>::quiet_NaN();
  /// Points with |q0 - f0| below noise_floor * sup|f0| are dropped.
  double noise_floor = 1e-12;
  std::size_t min_points = 32;
};

/// Log-log fit of |q0(t,x) - f0(x)| against x over t/2 + x0/2 < x < x_hi.
TailDecayReport verify_tail_decay(const Field& snapshot, const TailSpec& tail, const TailDecayOptions& options = {});

/// Profile bundle placed in the lab frame:
/// u0(x) = lambda0^{-1/2} (Q_b0 + p0 Y0 + eps0)((x - x0)/lambda0) + q0(x),
/// p0 = lambda0^{1/2} q0(x0). eps0 (may be empty) must satisfy the three
/// orthogonality conditions and vanish near the ends of its grid.
struct ComposeInput {
  double lambda0 = 1.0;
  double b0 = 0.0;
  double x0 = 0.0;
  const GridFunction* eps0 = nullptr;
  double orthogonality_tol = 1e-8;
};

Field compose_initial_data(const ComposeInput& input, const Field& q0, const profiles::ProfileSet& profiles);

/// Value of a periodic field at an arbitrary x by band-limited interpolation.
double field_value(const Field& field, double x);

// Snapshot file: first line "t,x_min,x_max,n", second line the numbers,
// then one sample per line. Doubles are written with 17 significant digits.
void write_snapshot(const Field& field, const std::filesystem::path& path);
Field read_snapshot(const std::filesystem::path& path);

}  // namespace gkdv::pde
