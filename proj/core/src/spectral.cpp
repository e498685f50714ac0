#include "gkdv/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <string>

#include "gkdv/errors.hpp"

namespace gkdv::spectral {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct RealFft::Impl {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(spec);
  }
};

RealFft::RealFft(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
  require(n >= 4 && n % 2 == 0, ErrorCode::invalid_argument,
          "RealFft: length must be even and at least 4, got " + std::to_string(n));
  const int ni = static_cast<int>(n);
  std::lock_guard lock(planner_mutex());
  impl_->real = fftw_alloc_real(n);
  impl_->spec = fftw_alloc_complex(n / 2 + 1);
  impl_->fwd = fftw_plan_dft_r2c_1d(ni, impl_->real, impl_->spec, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_c2r_1d(ni, impl_->spec, impl_->real, FFTW_ESTIMATE);
  require(impl_->fwd && impl_->inv, ErrorCode::invalid_argument, "RealFft: FFTW planning failed");
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<Complex> out) {
  require(in.size() == n_ && out.size() == modes(), ErrorCode::invalid_argument, "RealFft::forward: size mismatch");
  std::copy(in.begin(), in.end(), impl_->real);
  fftw_execute(impl_->fwd);
  std::memcpy(static_cast<void*>(out.data()), impl_->spec, sizeof(fftw_complex) * modes());
}

void RealFft::inverse(std::span<const Complex> in, std::span<double> out) {
  require(in.size() == modes() && out.size() == n_, ErrorCode::invalid_argument, "RealFft::inverse: size mismatch");
  // c2r destroys its input, so it always works on the internal copy.
  std::memcpy(impl_->spec, static_cast<const void*>(in.data()), sizeof(fftw_complex) * modes());
  fftw_execute(impl_->inv);
  std::copy(impl_->real, impl_->real + n_, out.begin());
}

std::vector<double> wavenumbers(std::size_t n, double length) {
  std::vector<double> k(n / 2 + 1);
  for (std::size_t m = 0; m < k.size(); ++m) k[m] = 2.0 * std::numbers::pi * static_cast<double>(m) / length;
  return k;
}

PeriodicInterpolator::PeriodicInterpolator(std::span<const double> values, double x_min, double length,
                                           std::size_t factor)
    : x_min_(x_min), length_(length) {
  require(factor >= 1, ErrorCode::invalid_argument, "PeriodicInterpolator: factor must be >= 1");
  require(length > 0.0, ErrorCode::invalid_argument, "PeriodicInterpolator: length must be positive");
  const std::size_t n = values.size();
  const std::size_t nf = n * factor;
  RealFft coarse(n);
  std::vector<Complex> spec(coarse.modes());
  coarse.forward(values, spec);
  // Split the Nyquist coefficient so the refined signal stays real and matches at nodes.
  spec.back() *= 0.5;
  RealFft fine(nf);
  std::vector<Complex> padded(fine.modes(), Complex{});
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t m = 0; m < spec.size(); ++m) padded[m] = spec[m] * scale;
  fine_.resize(nf);
  fine.inverse(padded, fine_);
  h_ = length / static_cast<double>(nf);
}

double PeriodicInterpolator::operator()(double x) const {
  const auto nf = static_cast<long>(fine_.size());
  double u = (x - x_min_) / h_;
  const double wraps = std::floor(u / static_cast<double>(nf));
  u -= wraps * static_cast<double>(nf);
  const auto base = static_cast<long>(std::floor(u)) - 2;
  double sum = 0.0;
  for (int j = 0; j < 6; ++j) {
    double w = 1.0;
    const double uj = static_cast<double>(base + j);
    for (int m = 0; m < 6; ++m) {
      if (m != j) w *= (u - static_cast<double>(base + m)) / (uj - static_cast<double>(base + m));
    }
    long idx = (base + j) % nf;
    if (idx < 0) idx += nf;
    sum += w * fine_[static_cast<std::size_t>(idx)];
  }
  return sum;
}

std::vector<double> derivative(std::span<const double> values, double length) {
  const std::size_t n = values.size();
  RealFft fft(n);
  std::vector<Complex> spec(fft.modes());
  fft.forward(values, spec);
  const auto k = wavenumbers(n, length);
  for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= Complex(0.0, k[m]) / static_cast<double>(n);
  spec.back() = 0.0;
  std::vector<double> out(n);
  fft.inverse(spec, out);
  return out;
}

}  // namespace gkdv::spectral
