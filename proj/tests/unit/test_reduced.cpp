#include <gtest/gtest.h>

#include <cmath>

#include "gkdv/errors.hpp"
#include "gkdv/reduced.hpp"

using namespace gkdv;
using namespace gkdv::reduced;

namespace {
constexpr double intQ = 3.4508218076;  // int Q, see the profile tests

ReducedTrajectory exact_run(double beta, double tol = 1e-13) {
  const auto p = params_from_beta(beta, intQ, 100.0);
  IntegrateOptions o;
  o.samples = 2001;
  return integrate(exact_solution(p, 100.0), p, 1e4, tol, o);
}
}  // namespace

TEST(RegimeParams, ThetaBetaMapsAreInverse) {
  for (double beta : {0.1, 0.25, 1.0 / 3.0, 0.4, 0.5, 0.54}) {
    EXPECT_NEAR(beta_of_theta(theta_of_beta(beta)), beta, 1e-14);
    const double th = theta_of_beta(beta);
    EXPECT_GT(th, 1.0);
    EXPECT_LT(th, 29.0 / 18.0);
  }
}

TEST(RegimeParams, ThresholdAmplitudeFormula) {
  const double th = 1.5;
  EXPECT_NEAR(threshold_c0(th, intQ), -(intQ / 2) * 0.5 * std::pow(2.0, 0.5), 1e-14);
}

TEST(ReducedRhs, ExactSolutionIsAFixedPointOfTheFlow) {
  for (double beta : {0.25, 0.4, 0.5}) {
    const auto p = params_from_beta(beta, intQ, 100.0);
    for (double s : {100.0, 537.0, 5000.0}) {
      const auto st = exact_solution(p, s);
      const auto d = rhs(st, p);
      EXPECT_NEAR(d.lambda_s, -beta * std::pow(s, -beta - 1.0), 1e-12 * std::pow(s, -beta - 1.0));
      EXPECT_NEAR(d.x_s, st.lambda, 1e-15);
      EXPECT_NEAR(d.b_s, -beta / (s * s), 1e-9 * beta / (s * s));
      EXPECT_NEAR(instability_coords(st, p).H, 0.0, 1e-18);
    }
  }
}

TEST(ReducedIntegrate, ReproducesPowerLawAndConservesG) {
  for (double beta : {0.25, 1.0 / 3.0, 0.4, 0.5}) {
    const auto tr = exact_run(beta);
    ASSERT_EQ(tr.status, TrajectoryStatus::completed);
    ASSERT_EQ(tr.samples.size(), 2001u);
    EXPECT_DOUBLE_EQ(tr.samples.back().state.s, 1e4);
    const auto p = tr.params;
    for (const auto& s : tr.samples) {
      EXPECT_NEAR(s.state.lambda / exact_solution(p, s.state.s).lambda, 1.0, 1e-6);
      EXPECT_NEAR(s.coords.g, 0.0, 1e-10);
    }
  }
}

TEST(ReducedIntegrate, OutputPointsAreLogSpaced) {
  const auto p = params_from_beta(0.4, intQ, 100.0);
  IntegrateOptions o;
  o.samples = 5;
  const auto tr = integrate(exact_solution(p, 100.0), p, 1e4, 1e-12, o);
  ASSERT_EQ(tr.samples.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(tr.samples[i].state.s, 100.0 * std::pow(10.0, 0.5 * i), 1e-9);
}

TEST(ReducedIntegrate, StopsAtUnitDiskExitWithOutgoingH) {
  const auto p = params_from_beta(0.4, intQ, 100.0);
  auto init = exact_solution(p, 100.0);
  // g is conserved and G = g s^{1/2 - 2 beta + ...}; a 30% excess in b leaves the disk near s = 2000.
  init.b *= 1.3;
  IntegrateOptions o;
  o.stop_at_exit = true;
  const auto tr = integrate(init, p, 1e4, 1e-12, o);
  ASSERT_EQ(tr.status, TrajectoryStatus::exited);
  ASSERT_TRUE(tr.exit.has_value());
  EXPECT_NEAR(tr.exit->coords.H, 1.0, 1e-8);
  EXPECT_LT(tr.samples.back().coords.H, 1.0 + 1e-8);
}

TEST(ReducedIntegrate, RejectsInvalidState) {
  const auto p = params_from_beta(0.4, intQ, 100.0);
  auto init = exact_solution(p, 100.0);
  init.lambda = -1.0;
  EXPECT_THROW(integrate(init, p, 1e4, 1e-12), Error);
}

TEST(Regime, ClassificationAndPredictedExponents) {
  EXPECT_EQ(classify_regime(0.5).regime, Regime::finite_time_blowup);
  EXPECT_DOUBLE_EQ(*classify_regime(0.5).predicted_exponent, 1.0);
  EXPECT_NEAR(*classify_regime(0.4).predicted_exponent, 2.0, 1e-12);
  EXPECT_EQ(classify_regime(1.0 / 3.0).regime, Regime::exponential_growup);
  EXPECT_EQ(classify_regime(0.25).regime, Regime::power_growup);
  EXPECT_DOUBLE_EQ(*classify_regime(0.25).predicted_exponent, 1.0);
  EXPECT_THROW(classify_regime(0.6), Error);
}

TEST(FitExponent, RecoversSyntheticFiniteTimeLaw) {
  std::vector<TimeSample> s;
  const double T = 3.7, nu = 1.6;
  for (int i = 0; i < 200; ++i) {
    const double t = T - std::pow(10.0, -0.02 * i);
    s.push_back({t, std::pow(T - t, nu)});
  }
  auto sk = classify_regime(0.5);
  const auto r = fit_exponent(s, sk);
  EXPECT_NEAR(r.fitted_exponent, nu, 1e-6);
  EXPECT_NEAR(r.T_or_rate, T, 1e-6);
}

TEST(FitExponent, RecoversExponentialRate) {
  std::vector<TimeSample> s;
  for (int i = 0; i < 100; ++i) s.push_back({0.5 * i, 2.0 * std::exp(-0.5 * i / 3.0)});
  const auto r = fit_exponent(s, classify_regime(1.0 / 3.0));
  EXPECT_NEAR(r.fitted_exponent, 1.0 / 3.0, 1e-10);
}

TEST(FitExponent, RefusesShortOrNonMonotoneSeries) {
  std::vector<TimeSample> s;
  for (int i = 0; i < 10; ++i) s.push_back({double(i), 1.0 / (1 + i)});
  EXPECT_THROW(fit_exponent(s, classify_regime(0.25)), Error);
  s.clear();
  for (int i = 0; i < 40; ++i) s.push_back({double(i), i == 20 ? 5.0 : 1.0 / (1 + i)});
  try {
    fit_exponent(s, classify_regime(0.25));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::fit_refused);
  }
}

TEST(FitExponent, RateTableFromTheReducedModel) {
  for (double beta : {0.25, 1.0 / 3.0, 0.4, 0.5}) {
    const auto tr = exact_run(beta);
    const auto sk = classify_regime(beta);
    const auto r = fit_exponent(fit_window(tr), sk);
    EXPECT_NEAR(r.fitted_exponent / *sk.predicted_exponent, 1.0, 0.02) << beta;
  }
}
