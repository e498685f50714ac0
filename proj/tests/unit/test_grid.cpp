#include <gtest/gtest.h>

#include <cmath>

#include "gkdv/errors.hpp"
#include "gkdv/grid.hpp"
#include "gkdv/smooth.hpp"

using namespace gkdv;

TEST(SmoothStep, FlatOutsideUnitIntervalAndMonotoneInside) {
  EXPECT_EQ(smooth_step(-0.5), 0.0);
  EXPECT_EQ(smooth_step(0.0), 0.0);
  EXPECT_EQ(smooth_step(1.0), 1.0);
  EXPECT_EQ(smooth_step(3.0), 1.0);
  double prev = 0.0;
  for (int i = 1; i < 1000; ++i) {
    const double v = smooth_step(i / 1000.0);
    // Near the ends the step is within rounding of 0 or 1.
    if (i >= 30 && i <= 960) EXPECT_GT(v, prev);
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_NEAR(smooth_step(0.5), 0.5, 1e-15);
}

TEST(SmoothStep, DerivativeMatchesCentralDifference) {
  for (double t : {0.1, 0.3, 0.5, 0.77, 0.95}) {
    const double h = 1e-6;
    const double fd = (smooth_step(t + h) - smooth_step(t - h)) / (2 * h);
    EXPECT_NEAR(smooth_step_derivative(t), fd, 1e-7);
  }
}

TEST(TransitionBlend, ConnectsBranchesMonotonically) {
  const TransitionBlend blend(-1.0, -0.5, {[](double y) { return std::exp(y); }, [](double y) { return std::exp(y); }},
                              {[](double y) { return 1.0 + y; }, [](double) { return 1.0; }});
  EXPECT_NEAR(blend.value(-1.0), std::exp(-1.0), 1e-12);
  EXPECT_NEAR(blend.value(-0.5), 0.5, 1e-10);
  for (double y = -1.0; y <= -0.5; y += 0.01) EXPECT_GT(blend.slope(y), 0.0);
}

TEST(GridSpec, RejectsDegenerateGrids) {
  EXPECT_THROW((GridSpec{1.0, 0.0, 100}.validate()), Error);
  EXPECT_THROW((GridSpec{-1.0, 1.0, 3}.validate()), Error);
  EXPECT_NO_THROW(GridSpec::reference().validate());
  EXPECT_DOUBLE_EQ(GridSpec::reference().spacing(), 0.01);
}

TEST(GridSpec, WithSpacingNeverCoarser) {
  const auto g = GridSpec::with_spacing(-3.0, 7.0, 0.03);
  EXPECT_LE(g.spacing(), 0.03);
  EXPECT_DOUBLE_EQ(g.y_min, -3.0);
  EXPECT_DOUBLE_EQ(g.y_max, 7.0);
}

TEST(Quadrature, SimpsonExactForCubicsBothParities) {
  for (std::size_t n : {101u, 100u}) {
    const GridSpec g{0.0, 2.0, n};
    const auto f = GridFunction::sample(g, [](double y) { return y * y * y - 2 * y + 1; });
    EXPECT_NEAR(integrate(f), 4.0 - 4.0 + 2.0, 1e-12) << n;
  }
}

TEST(Quadrature, GaussianIntegralConvergesToSqrtPi) {
  const GridSpec g{-12.0, 12.0, 2401};
  const auto f = GridFunction::sample(g, [](double y) { return std::exp(-y * y); });
  EXPECT_NEAR(integrate(f), std::sqrt(M_PI), 1e-12);
}

TEST(Quadrature, InnerProductRequiresSameGrid) {
  const auto a = GridFunction::zeros({0.0, 1.0, 17});
  const auto b = GridFunction::zeros({0.0, 1.0, 33});
  EXPECT_THROW(inner(a, b), Error);
  EXPECT_EQ(inner(a, a), 0.0);
}

TEST(Differences, FourthOrderUnderRefinement) {
  auto err = [](std::size_t n) {
    const GridSpec g{0.0, 3.0, n};
    const auto f = GridFunction::sample(g, [](double y) { return std::sin(2 * y); });
    const auto d = derivative(f);
    const auto d2 = second_derivative(f);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      e = std::max(e, std::abs(d[i] - 2 * std::cos(2 * g.node(i))));
      e = std::max(e, std::abs(d2[i] + 4 * std::sin(2 * g.node(i))));
    }
    return e;
  };
  const double ratio = err(201) / err(401);
  EXPECT_GT(ratio, 12.0);  // 16 asymptotically
}

TEST(Differences, CumulativeFromTopMatchesAntiderivative) {
  const GridSpec g{0.0, 2.0, 401};
  const auto f = GridFunction::sample(g, [](double y) { return std::exp(y); });
  const auto r = cumulative_from_top(f);
  for (std::size_t i = 0; i < g.n; i += 50) EXPECT_NEAR(r[i], std::exp(2.0) - std::exp(g.node(i)), 1e-9);
  EXPECT_EQ(r[g.n - 1], 0.0);
}

TEST(Interpolation, ExactAtNodesAndForQuintics) {
  const GridSpec g{-1.0, 1.0, 41};
  auto p5 = [](double y) { return 1 + y - 2 * y * y + 0.5 * std::pow(y, 5); };
  const auto f = GridFunction::sample(g, p5);
  for (std::size_t i = 0; i < g.n; ++i) EXPECT_DOUBLE_EQ(interpolate(f, g.node(i)), f[i]);
  for (double y : {-0.987, -0.31, 0.0123, 0.77}) EXPECT_NEAR(interpolate(f, y), p5(y), 1e-13);
  EXPECT_THROW(interpolate(f, 1.5), Error);
}
