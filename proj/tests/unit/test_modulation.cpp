#include <gtest/gtest.h>

#include <cmath>

#include "gkdv/errors.hpp"
#include "gkdv/modulation.hpp"
#include "gkdv/reduced.hpp"

using namespace gkdv;
using namespace gkdv::modulation;

namespace {

const profiles::ProfileSet& ps() {
  static const auto p = profiles::build_profile_set();
  return p;
}

struct Composed {
  pde::Field u, q0;
  reduced::ReducedState exact;
};

// Composed data at beta = 0.4, s0 = 10 in a small box with a short tail.
const Composed& composed() {
  static const Composed c = [] {
    const auto rp = reduced::params_from_beta(0.4, ps().intQ, 10.0);
    const auto ex = reduced::exact_solution(rp, 10.0);
    const pde::DomainSpec d{-64, 64, 4096};
    auto q0 = pde::build_tail({rp.c0, rp.theta, ex.x, 40.0, 10.0}, d);
    auto u = pde::compose_initial_data({ex.lambda, ex.b, ex.x, nullptr}, q0, ps());
    return Composed{u, q0, ex};
  }();
  return c;
}

}  // namespace

TEST(Weights, PrescribedBranches) {
  EXPECT_DOUBLE_EQ(phi(1, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(phi(2, 0.25), 1.25);
  EXPECT_DOUBLE_EQ(phi(1, -3.0), std::exp(-3.0));
  EXPECT_DOUBLE_EQ(phi(2, 3.0), 9.0);
  EXPECT_DOUBLE_EQ(phi(1, 4.0), 4.0);
  EXPECT_DOUBLE_EQ(psi(1.0), 1.0);
  EXPECT_DOUBLE_EQ(psi(-2.0), std::exp(-4.0));
}

TEST(Weights, MonotoneWithPositivePhiSlope) {
  for (double y = -4.0; y < 4.0; y += 1e-3) {
    EXPECT_GT(phi_slope(1, y), 0.0);
    EXPECT_GT(phi_slope(2, y), 0.0);
    EXPECT_GE(psi_slope(y), 0.0);
  }
}

TEST(Weights, GridRequirements) {
  EXPECT_THROW(build_weights(50.0, weight_grid(50.0)), Error);
  EXPECT_THROW(build_weights(128.0, GridSpec{-100, 100, 4001}), Error);
  const auto g = weight_grid(128.0);
  EXPECT_EQ(g.n, 51201u);
}

TEST(Norms, GaussianOracle) {
  const auto g = weight_grid(128.0);
  const auto W = build_weights(128.0, g);
  const auto e = GridFunction::sample(g, [](double y) { return std::exp(-y * y); });
  const auto n = norms(e, W);
  // Near the origin phi_{i,B} = 1 + y/B and psi_B = 1; corrections are O(B^-2).
  const double l2 = std::sqrt(M_PI / 2.0);
  const double h1 = std::sqrt(M_PI / 2.0);  // int (2y e^{-y^2})^2
  EXPECT_NEAR(n.N1, h1 + l2, 1e-3);
  EXPECT_NEAR(n.N1_loc, l2 / 128.0, 1e-6);
  EXPECT_EQ(norms(GridFunction::zeros(g), W).N2, 0.0);
}

TEST(Orthogonality, OrthogonalizeAnnihilatesAllThreeProducts) {
  const auto& g = ps().grid;
  const auto v = GridFunction::sample(g, [](double y) { return std::exp(-0.3 * (y - 1) * (y - 1)) * (1 + y); });
  const auto w = orthogonalize(v);
  for (double r : orthogonality(w)) EXPECT_NEAR(r, 0.0, 1e-12);
  EXPECT_EQ(local_norm(GridFunction::zeros(g)), 0.0);
}

TEST(Decompose, RecoversComposedParametersFromExactGuess) {
  const auto& c = composed();
  const ModulationState g{10, 0, c.exact.lambda, c.exact.x, c.exact.b, 0};
  const auto D = decompose(c.u, c.q0, g, ps());
  EXPECT_LE(D.iterations, 6u);
  EXPECT_NEAR(D.state.lambda, c.exact.lambda, 1e-8);
  EXPECT_NEAR(D.state.x, c.exact.x, 1e-8);
  EXPECT_NEAR(D.state.b, c.exact.b, 1e-8);
  for (double r : D.residuals) EXPECT_LT(std::abs(r), 1e-10);
}

TEST(Decompose, ConvergesFromPerturbedGuess) {
  const auto& c = composed();
  const ModulationState g{10, 0, 1.01 * c.exact.lambda, c.exact.x + 0.01 * c.exact.lambda, 1.01 * c.exact.b, 0};
  const auto D = decompose(c.u, c.q0, g, ps());
  EXPECT_LE(D.iterations, 20u);
  EXPECT_NEAR(D.state.lambda, c.exact.lambda, 1e-8);
  EXPECT_NEAR(D.state.x, c.exact.x, 1e-8);
  EXPECT_NEAR(D.state.b, c.exact.b, 1e-8);
}

TEST(Decompose, RefusesGuessFarFromTheBundle) {
  const auto& c = composed();
  const ModulationState g{10, 0, c.exact.lambda, c.exact.x + 5.0, c.exact.b, 0};
  EXPECT_THROW(decompose(c.u, c.q0, g, ps()), Error);
}

TEST(Jacobian, FiniteDifferencesMatchAnalyticAtTrivialPoint) {
  const pde::DomainSpec d{-64, 64, 2048};
  const auto q = pde::Field::sample(0, d, profiles::q_value);
  const FrameSampler fs(q, pde::Field::zeros(0, d));
  const auto J = jacobian(fs, {0, 0, 1, 0, 0, 0}, ps(), ps().grid);
  const auto A = trivial_jacobian(ps());
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(J[r][k], A[r][k], 1e-6) << r << "," << k;
}

TEST(Residuals, SyntheticTrajectoryObeysTheLaws) {
  // lambda = 1/(1+t), b = -lambda^2 lambda_t = lambda^4, x_t = lambda^{-2}.
  std::vector<TrajectoryPoint> pts;
  for (int i = 0; i <= 200; ++i) {
    const double t = 0.005 * i;
    const double l = 1.0 / (1.0 + t);
    ModulationState st{i == 0 ? 10.0 : 0.0, t, l, 5.0 + (std::pow(1 + t, 3) - 1) / 3.0, std::pow(l, 4), 0.0};
    pts.push_back({st, 0.0, 0.0});
  }
  const auto rep = modulation_residuals(pts, -1.0, 1.5, 3.45);
  EXPECT_LT(rep.max_ratio, 1e-3);
  ASSERT_FALSE(rep.samples.empty());
  // s is rebuilt by quadrature of lambda^{-3}: s(t) = 10 + ((1+t)^4 - 1)/4.
  const auto& last = rep.samples.back();
  EXPECT_NEAR(last.s, 10.0 + (std::pow(1 + last.t, 4) - 1) / 4.0, 1e-7);
}

TEST(Residuals, NeedsUniformTimesAndEnoughPoints) {
  std::vector<TrajectoryPoint> pts(2);
  EXPECT_THROW(modulation_residuals(pts, -1.0, 1.5, 3.45), Error);
  pts.resize(5);
  for (int i = 0; i < 5; ++i) pts[i].state = {10.0, i * i * 0.1, 1.0, 1.0 + i, 0.0, 0.0};
  EXPECT_THROW(modulation_residuals(pts, -1.0, 1.5, 3.45), Error);
}
