#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gkdv/spectral.hpp"

using namespace gkdv::spectral;

TEST(RealFft, RoundTripScalesByN) {
  const std::size_t n = 96;
  RealFft fft(n);
  std::vector<double> x(n), y(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = std::sin(0.3 * j) + 0.1 * j;
  std::vector<Complex> X(fft.modes());
  fft.forward(x, X);
  fft.inverse(X, y);
  for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(y[j] / n, x[j], 1e-12);
}

TEST(RealFft, SingleModeLandsInItsBin) {
  const std::size_t n = 64;
  RealFft fft(n);
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = std::cos(2 * M_PI * 5 * j / n);
  std::vector<Complex> X(fft.modes());
  fft.forward(x, X);
  for (std::size_t k = 0; k < X.size(); ++k) EXPECT_NEAR(std::abs(X[k]), k == 5 ? n / 2.0 : 0.0, 1e-10);
}

TEST(Wavenumbers, LayoutAndScale) {
  const auto k = wavenumbers(8, 4 * M_PI);
  ASSERT_EQ(k.size(), 5u);
  for (std::size_t m = 0; m < 5; ++m) EXPECT_DOUBLE_EQ(k[m], 0.5 * m);
}

TEST(SpectralDerivative, ExactForTrigonometricPolynomial) {
  const std::size_t n = 128;
  const double L = 10.0;
  std::vector<double> f(n);
  for (std::size_t j = 0; j < n; ++j) f[j] = std::sin(2 * M_PI * 3 * (j * L / n) / L);
  const auto d = derivative(f, L);
  for (std::size_t j = 0; j < n; ++j) {
    EXPECT_NEAR(d[j], 2 * M_PI * 3 / L * std::cos(2 * M_PI * 3 * (j * L / n) / L), 1e-11);
  }
}

TEST(PeriodicInterpolator, BandLimitedSignalBetweenNodes) {
  const std::size_t n = 256;
  const double L = 20.0, x0 = -10.0;
  auto f = [&](double x) { return std::exp(-x * x); };
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = f(x0 + j * L / n);
  const PeriodicInterpolator ip(v, x0, L);
  for (double x : {-3.21, -0.013, 0.5, 2.7777}) EXPECT_NEAR(ip(x), f(x), 1e-9);
  // Periodic wrap.
  EXPECT_NEAR(ip(0.5 + L), ip(0.5), 1e-12);
}
