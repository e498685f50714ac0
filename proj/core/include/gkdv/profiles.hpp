#pragma once

#include "gkdv/grid.hpp"

namespace gkdv::profiles {

/// Exponent of the cutoff scale: chi_b(y) = chi(|b|^gamma y).
inline constexpr double cutoff_gamma = 0.75;

// Closed forms of the ground state Q(y) = (3 / cosh^2(2y))^{1/4}, overflow-safe.
double q_value(double y);
double q_slope(double y);
/// Scaling generator applied to Q: Q/2 + y Q'.
double lambda_q_value(double y);

GridFunction ground_state(const GridSpec& grid);
GridFunction ground_state_derivative(const GridSpec& grid);
GridFunction lambda_q(const GridSpec& grid);

/// Lf = -f'' + f - 5 Q^4 f with fourth-order differences. Requires
/// |y_min|, |y_max| >= 15 (domain_too_small otherwise).
GridFunction apply_L(const GridFunction& f);

/// Generator of the L2 scaling on a sampled function: f/2 + y f'.
GridFunction apply_Lambda(const GridFunction& f);

enum class Symmetrize { yes, no };

/// Even decaying solution of L Y0 = 5 Q^4 (Dirichlet solve, Q' projected out,
/// then symmetrized unless asked not to). Needs a symmetric wide grid.
GridFunction solve_Y0(const GridSpec& grid, Symmetrize symmetrize = Symmetrize::yes);

/// P with L P = -int_y^inf Lambda Q, P(y_max) = 0, P'(y_min) = 0 and (P, Q') = 0.
/// Throws normalization if P(y_min) misses (1/2) int Q by more than 1e-6 relative.
GridFunction solve_P(const GridSpec& grid);

/// Fixed smooth monotone transition: 0 on (-inf, -2], 1 on [-1, inf).
double chi(double z);
double chi_slope(double z);
/// chi(|b|^{3/4} y); b = 0 gives the constant 1.
GridFunction cutoff_chi_b(double b, const GridSpec& grid);

/// Q, Y0, P and friends solved once on a reference grid and evaluable at any y
/// (interpolated inside, continued by their asymptotic forms outside).
struct ProfileSet {
  GridSpec grid;
  GridFunction Q, dQ, LambdaQ, Y0, P;
  double intQ = 0.0;
  double intQ2 = 0.0;

  double Q_at(double y) const { return q_value(y); }
  double Y0_at(double y) const;
  double P_at(double y) const;
  GridFunction Y0_on(const GridSpec& g) const;
  GridFunction P_on(const GridSpec& g) const;
};

ProfileSet build_profile_set(const GridSpec& grid = GridSpec::reference());

/// Q_b = Q + b chi_b P on an arbitrary grid; P is taken from the profile set.
GridFunction build_Qb(double b, const GridSpec& grid, const ProfileSet& profiles);
GridFunction build_Qb(double b, const GridSpec& grid);

/// Value of Q_b at a single point (used when assembling lab-frame data).
double qb_at(double b, double y, const ProfileSet& profiles);

struct PsiB {
  GridFunction psi;
  /// sup of |Psi_b| divided by the pointwise envelope
  /// |b|^{1+gamma} 1_{[-2,-1]}(|b|^gamma y) + b^2 (e^{-|y|/2} + 1_{[-2,0]}(|b|^gamma y)).
  double bound_constant = 0.0;
};

/// -Psi_b = (Q_b'' - Q_b + Q_b^5)' + b Lambda Q_b. The identity Q'' - Q + Q^5 = 0
/// is used in closed form, so b = 0 returns the zero function exactly.
PsiB psi_b(double b, const GridSpec& grid, const ProfileSet& profiles);

/// E(f) = 1/2 int f'^2 - 1/6 int f^6 on the grid.
double energy(const GridFunction& f);

struct ProfileIdentities {
  double intQ = 0.0;
  double intQ2 = 0.0;
  double inner_Q_Y0 = 0.0;
  double inner_P_Q = 0.0;
  double inner_P_Qprime = 0.0;

  // Residuals reported alongside the identities.
  double y0_identity_rel = 0.0;       // |(Q,Y0) + 3/4 int Q| / int Q
  double p_identity_rel = 0.0;        // |(P,Q) - (int Q)^2/16| / (int Q)^2
  double p_qprime_abs = 0.0;          // |(P,Q')|
  double ground_state_residual = 0.0; // sup |Q'' + Q^5 - Q|
  double y0_equation_residual = 0.0;  // sup |L Y0 - 5 Q^4| on the interior
  double p_left_limit_error = 0.0;    // |P(y_min) - int Q / 2|
};

ProfileIdentities identities(const ProfileSet& profiles);

struct QbExpansion {
  double b = 0.0;
  double mass_error = 0.0;    // int Q_b^2 - int Q^2 - 2b (P, Q)
  double energy_error = 0.0;  // E(Q_b) + b (P, Q)
  std::size_t nodes = 0;
};

/// Mass and energy of Q_b against their first-order expansions, on a grid of
/// spacing h wide enough to hold the whole cutoff transition. 0 < |b| < 0.1.
QbExpansion qb_expansion(double b, const ProfileSet& profiles, double h = 0.01);

}  // namespace gkdv::profiles
