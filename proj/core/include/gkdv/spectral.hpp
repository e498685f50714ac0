#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace gkdv::spectral {

using Complex = std::complex<double>;

/// Real-to-complex transform pair of fixed length n (even). Plans use
/// FFTW_ESTIMATE so identical inputs give bit-identical outputs run to run.
/// Not safe for concurrent use of one instance; plan creation is serialized.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;

  std::size_t size() const { return n_; }
  std::size_t modes() const { return n_ / 2 + 1; }

  /// Unnormalized forward transform: out[k] = sum_j in[j] e^{-2 pi i jk/n}.
  void forward(std::span<const double> in, std::span<Complex> out);
  /// Unnormalized inverse: out[j] = sum_k in[k] e^{2 pi i jk/n} (Hermitian completion).
  void inverse(std::span<const Complex> in, std::span<double> out);

 private:
  struct Impl;
  std::size_t n_ = 0;
  std::unique_ptr<Impl> impl_;
};

/// Angular wavenumbers 2 pi m / length for the r2c layout (m = 0..n/2).
std::vector<double> wavenumbers(std::size_t n, double length);

/// Band-limited interpolation of periodic samples: the spectrum is zero-padded
/// by an integer factor and the refined samples are read with six-point
/// Lagrange interpolation.
class PeriodicInterpolator {
 public:
  PeriodicInterpolator(std::span<const double> values, double x_min, double length, std::size_t factor = 8);
  double operator()(double x) const;
  double x_min() const { return x_min_; }
  double length() const { return length_; }

 private:
  std::vector<double> fine_;
  double x_min_ = 0.0;
  double length_ = 0.0;
  double h_ = 0.0;
};

/// Spectral derivative of periodic samples on a box of the given length.
std::vector<double> derivative(std::span<const double> values, double length);

}  // namespace gkdv::spectral
