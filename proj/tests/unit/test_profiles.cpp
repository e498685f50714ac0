#include <gtest/gtest.h>

#include <cmath>

#include "gkdv/errors.hpp"
#include "gkdv/profiles.hpp"

using namespace gkdv;
using namespace gkdv::profiles;

namespace {

const ProfileSet& reference() {
  static const ProfileSet ps = build_profile_set();
  return ps;
}

// Independent quadrature of the closed form on a wide, fine grid. The
// trapezoid rule is spectrally accurate for this analytic, decaying integrand.
double trapezoid_Q_power(double power) {
  const double h = 1e-3;
  double s = 0.0;
  for (int i = -40000; i <= 40000; ++i) {
    const double y = i * h;
    s += std::pow(std::pow(3.0, 0.25) / std::sqrt(std::cosh(2 * y)), power);
  }
  return s * h;
}

}  // namespace

TEST(GroundState, ClosedFormSolvesProfileEquation) {
  for (double y : {-3.0, -0.7, 0.0, 0.4, 2.5}) {
    const double h = 1e-4;
    const double q2 = (q_value(y + h) - 2 * q_value(y) + q_value(y - h)) / (h * h);
    EXPECT_NEAR(q2 + std::pow(q_value(y), 5) - q_value(y), 0.0, 1e-6);
  }
  EXPECT_NEAR(q_value(0.0), std::pow(3.0, 0.25), 1e-15);
  EXPECT_TRUE(std::isfinite(q_value(1e4)));
  EXPECT_EQ(q_value(-2.0), q_value(2.0));
}

TEST(GroundState, MassAndIntegralMatchIndependentQuadrature) {
  const auto& ps = reference();
  EXPECT_NEAR(ps.intQ2, std::sqrt(3.0) * M_PI / 2.0, 1e-10);
  EXPECT_NEAR(ps.intQ, trapezoid_Q_power(1.0), 1e-9);
  EXPECT_NEAR(ps.intQ2, 2.720699, 1e-6);
}

TEST(LinearizedOperator, KernelAndScalingRelation) {
  const auto& ps = reference();
  const auto lq = apply_L(ps.dQ);
  const auto lam = apply_L(ps.LambdaQ);
  for (std::size_t i = 200; i + 200 < ps.grid.n; i += 37) {
    EXPECT_NEAR(lq[i], 0.0, 1e-6);
    EXPECT_NEAR(lam[i], -2.0 * ps.Q[i], 1e-6);
  }
}

TEST(LinearizedOperator, RefusesNarrowGrids) {
  const GridSpec narrow{-10.0, 10.0, 1001};
  EXPECT_THROW(apply_L(ground_state(narrow)), Error);
}

TEST(Y0, IdentityEvennessAndEquation) {
  const auto& ps = reference();
  const auto id = identities(ps);
  EXPECT_LT(id.y0_identity_rel, 1e-6);
  EXPECT_NEAR(id.inner_Q_Y0, -0.75 * ps.intQ, 1e-6 * ps.intQ);
  for (std::size_t i = 0; i < ps.grid.n; ++i) EXPECT_EQ(ps.Y0[i], ps.Y0[ps.grid.n - 1 - i]);
  const auto raw = solve_Y0(ps.grid, Symmetrize::no);
  for (std::size_t i = 0; i < ps.grid.n; i += 50) EXPECT_NEAR(raw[i], ps.Y0[i], 1e-8);
}

TEST(P, IdentitiesAndBoundaryValues) {
  const auto& ps = reference();
  const auto id = identities(ps);
  EXPECT_LT(id.p_identity_rel, 1e-6);
  EXPECT_LT(id.p_qprime_abs, 1e-8);
  EXPECT_NEAR(id.inner_P_Q, ps.intQ * ps.intQ / 16.0, 1e-6 * ps.intQ * ps.intQ);
  // The kernel component added by the projection leaves a multiple of Q'(y_max) ~ e^{-25}.
  EXPECT_NEAR(ps.P[ps.grid.n - 1], 0.0, 1e-10);
  EXPECT_NEAR(ps.P[0], 0.5 * ps.intQ, 1e-6 * ps.intQ);
}

TEST(P, NarrowGridMissesTheLeftLimitAndIsRefused) {
  try {
    solve_P({-18.0, 18.0, 3601});
    FAIL() << "expected a normalization error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::normalization);
  }
}

TEST(Cutoff, PlateausAndTransition) {
  const double b = 0.01;
  const double scale = std::pow(b, -0.75);
  const GridSpec g{-2.5 * scale, 1.0, 20001};
  const auto c = cutoff_chi_b(b, g);
  EXPECT_EQ(chi(0.0), 1.0);
  EXPECT_EQ(chi(-2.0), 0.0);
  const double mid = chi(-1.5);
  EXPECT_GT(mid, 0.0);
  EXPECT_LT(mid, 1.0);
  for (std::size_t i = 1; i < g.n; ++i) EXPECT_GE(c[i], c[i - 1]);
  const auto one = cutoff_chi_b(0.0, g);
  EXPECT_EQ(one.sup_norm(), 1.0);
}

TEST(Qb, ZeroBGivesGroundStateExactly) {
  const auto& ps = reference();
  const auto qb = build_Qb(0.0, ps.grid, ps);
  for (std::size_t i = 0; i < ps.grid.n; ++i) EXPECT_EQ(qb[i], ps.Q[i]);
  EXPECT_EQ(qb_at(0.0, 0.3, ps), q_value(0.3));
}

TEST(Qb, MassExpansionExponent) {
  const auto& ps = reference();
  std::vector<double> lb, le;
  for (double b : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const auto e = qb_expansion(b, ps);
    lb.push_back(std::log(b));
    le.push_back(std::log(std::abs(e.mass_error)));
  }
  for (std::size_t i = 1; i < lb.size(); ++i) {
    const double slope = (le[i] - le[i - 1]) / (lb[i] - lb[i - 1]);
    EXPECT_GE(slope, 1.2);
    EXPECT_LE(slope, 2.1);
  }
  EXPECT_THROW(qb_expansion(0.0, ps), Error);
  EXPECT_THROW(qb_expansion(0.2, ps), Error);
}

TEST(Qb, EnergyExpansionIsQuadraticAtModerateB) {
  const auto& ps = reference();
  const auto e2 = qb_expansion(1e-2, ps);
  const auto e3 = qb_expansion(1e-3, ps);
  const double slope = std::log(std::abs(e2.energy_error / e3.energy_error)) / std::log(10.0);
  EXPECT_GT(slope, 1.8);
}

TEST(PsiB, VanishesAtZeroAndScalesQuadraticallyInside) {
  const auto& ps = reference();
  EXPECT_EQ(psi_b(0.0, ps.grid, ps).psi.sup_norm(), 0.0);
  std::vector<double> sups;
  for (double b : {1e-2, 1e-3, 1e-4}) sups.push_back(psi_b(b, ps.grid, ps).psi.sup_norm_on(-1.0, 1.0));
  for (std::size_t i = 1; i < sups.size(); ++i) EXPECT_GT(std::log10(sups[i - 1] / sups[i]), 2.0 - 0.1);
}
