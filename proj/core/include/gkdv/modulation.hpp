#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gkdv/grid.hpp"
#include "gkdv/pde.hpp"
#include "gkdv/profiles.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv::modulation {

struct ModulationState {
  double s = 0.0;
  double t = 0.0;
  double lambda = 1.0;
  double x = 0.0;
  double b = 0.0;
  double p = 0.0;  // lambda^{1/2} q0(t, x)
};

// Unscaled weights. phi_i: e^y for y < -1, 1 + y on (-1/2, 1/2), y^i for y > 2.
// psi: e^{2y} for y < -1, 1 for y > -1/2. The gaps are closed by monotone
// C-infinity blends.
double phi(int i, double y);
double phi_slope(int i, double y);
double psi(double y);
double psi_slope(double y);

struct WeightSet {
  double B = 128.0;
  GridSpec grid;
  GridFunction psi_B, phi1_B, phi2_B;
  GridFunction dpsi_B, dphi1_B, dphi2_B;
};

/// psi_B(y) = psi(y/B), phi_{i,B}(y) = phi_i(y/B) sampled on a grid that must
/// cover [-10B, 10B]. B must exceed 100.
WeightSet build_weights(double B, const GridSpec& grid);

/// Grid on [-10B, 10B] with spacing h.
GridSpec weight_grid(double B, double h = 0.05);

struct NormReport {
  double N1 = 0.0;
  double N2 = 0.0;
  double N1_loc = 0.0;
  double N2_loc = 0.0;
  double F1 = 0.0;
  double F2 = 0.0;
};

/// N_i = int eps_y^2 psi_B + eps^2 phi_{i,B} and N_{i,loc} = int eps^2 phi_{i,B}'.
/// F1, F2 are left at zero (see lyapunov_F).
NormReport norms(const GridFunction& eps, const WeightSet& weights);

/// F_i = int [eps_y^2 psi_B + eps^2 phi_{i,B}
///            - 1/3 ((eps + V)^6 - V^6 - 6 eps (Q_b^5 + q^5 + 5 Q^4 (p Y0 + q))) psi_B],
/// V = Q_b + p Y0 + q, with q the tail in the rescaled frame, on the weight grid.
double lyapunov_F(const GridFunction& eps, const ModulationState& state, const GridFunction& q,
                  const WeightSet& weights, int i, const profiles::ProfileSet& profiles);

/// Evaluates w = u - q0 and q0 anywhere on the periodic box.
class FrameSampler {
 public:
  FrameSampler(const pde::Field& u, const pde::Field& q0, std::size_t upsample = 8);
  double w(double x) const { return w_(x); }
  double q0(double x) const { return q0_(x); }
  double t() const { return t_; }
  const pde::DomainSpec& domain() const { return domain_; }

 private:
  spectral::PeriodicInterpolator w_;
  spectral::PeriodicInterpolator q0_;
  double t_;
  pde::DomainSpec domain_;
};

/// eps(y) = lambda^{1/2} w(lambda y + x) - Q_b(y) - p Y0(y) on the given grid.
/// The image of the grid must lie inside the box (interpolation_range otherwise).
GridFunction remainder(const FrameSampler& frame, const ModulationState& state, const GridSpec& grid,
                       const profiles::ProfileSet& profiles);

/// q(y) = lambda^{1/2} q0(lambda y + x) on the given grid.
GridFunction frame_tail(const FrameSampler& frame, const ModulationState& state, const GridSpec& grid);

/// ((eps, y Lambda Q), (eps, Lambda Q), (eps, Q)).
std::array<double, 3> orthogonality(const GridFunction& eps);

/// Removes the span of {y Lambda Q, Lambda Q, Q} so that all three inner
/// products vanish (3x3 Gram solve).
GridFunction orthogonalize(const GridFunction& v);

struct DecomposeOptions {
  double tol = 1e-10;
  std::size_t max_iter = 30;
  /// Admission gate: ||eps(guess)|| < alpha_star ||Q||.
  double alpha_star = 0.1;
  double fd_step = 1e-6;
  /// Grid for eps and the orthogonality products; empty means the profile grid.
  std::optional<GridSpec> grid;
};

struct Decomposition {
  ModulationState state;
  GridFunction eps;
  std::array<double, 3> residuals{};
  std::size_t iterations = 0;
  double initial_eps_norm = 0.0;
};

/// Newton iteration on (b, lambda, x) driving the three orthogonality
/// residuals below tol, with a central-difference Jacobian.
Decomposition decompose(const FrameSampler& frame, const ModulationState& guess, const profiles::ProfileSet& profiles,
                        const DecomposeOptions& options = {});
Decomposition decompose(const pde::Field& u, const pde::Field& q0, const ModulationState& guess,
                        const profiles::ProfileSet& profiles, const DecomposeOptions& options = {});

/// Jacobian of the residual vector with respect to (b, lambda, x) at a state,
/// columns in that order, rows as in orthogonality().
std::array<std::array<double, 3>, 3> jacobian(const FrameSampler& frame, const ModulationState& state,
                                              const profiles::ProfileSet& profiles, const GridSpec& grid,
                                              double fd_step = 1e-6);

/// Analytic Jacobian at lambda = 1, x = 0, b = 0, p = 0, eps = 0.
std::array<std::array<double, 3>, 3> trivial_jacobian(const profiles::ProfileSet& profiles);

/// int eps^2 e^{-|y|/10}.
double local_norm(const GridFunction& eps);

struct ResidualSample {
  double t = 0.0;
  double s = 0.0;
  double lambda_res = 0.0;  // |lambda_s/lambda + b|
  double x_res = 0.0;       // |x_s/lambda - 1|
  double b_s = 0.0;
  double g = 0.0;
  double g_s = 0.0;
  double bound = 0.0;        // N_{2,loc}^{1/2} + s^{-2}
  double modulation_bound = 0.0;  // (int eps^2 e^{-|y|/10})^{1/2} + b^2 + p^2 + lambda |p| / x
  double g_bound = 0.0;      // right-hand side shape of the g law, per unit s
};

struct ResidualReport {
  std::vector<ResidualSample> samples;
  double max_ratio = 0.0;       // max over samples of max(lambda_res, x_res) / bound
  double max_modulation_ratio = 0.0;
  double g_drift = 0.0;         // g(s_end) - g(s_start)
  double g_integrated_bound = 0.0;
  double g_ratio = 0.0;         // |g_drift| / integrated bound
};

struct TrajectoryPoint {
  ModulationState state;
  double N2_loc = 0.0;
  double local = 0.0;  // int eps^2 e^{-|y|/10}
};

/// Finite-difference modulation residuals along states sampled at uniform t.
/// s is rebuilt from t by cumulative Simpson of 1/lambda^3 starting at points[0].state.s;
/// derivatives are fourth-order central differences (the two end points on
/// each side are dropped; second order with fewer than 5 points). Needs at least 3 points.
ResidualReport modulation_residuals(std::span<const TrajectoryPoint> points, double c0, double theta, double intQ);

}  // namespace gkdv::modulation
