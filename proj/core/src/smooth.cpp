#include "gkdv/smooth.hpp"

#include <array>
#include <cmath>

#include "gkdv/errors.hpp"

namespace gkdv {

namespace {

double exp_inv(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double exp_inv_prime(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

// Five-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> gl_x{-0.9061798459386640, -0.5384693101056831, 0.0,
                                     0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> gl_w{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                     0.4786286704993665, 0.2369268850561891};

template <typename F>
double gauss(F&& f, double lo, double hi) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double s = 0.0;
  for (std::size_t k = 0; k < gl_x.size(); ++k) s += gl_w[k] * f(mid + half * gl_x[k]);
  return s * half;
}

constexpr std::size_t table_cells = 2048;

}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double e0 = exp_inv(t);
  const double e1 = exp_inv(1.0 - t);
  return e0 / (e0 + e1);
}

double smooth_step_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double e0 = exp_inv(t);
  const double e1 = exp_inv(1.0 - t);
  const double d0 = exp_inv_prime(t);
  const double d1 = exp_inv_prime(1.0 - t);
  const double den = e0 + e1;
  return (d0 * e1 + e0 * d1) / (den * den);
}

double plateau_bump(double t, double w) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return smooth_step(t / w) * smooth_step((1.0 - t) / w);
}

TransitionBlend::TransitionBlend(double a, double c, Branch left, Branch right)
    : a_(a), c_(c), left_(std::move(left)), right_(std::move(right)) {
  require(a < c, ErrorCode::invalid_argument, "TransitionBlend: need a < c");
  const double len = c_ - a_;
  auto bump = [&](double y) { return plateau_bump((y - a_) / len); };

  double base = 0.0;
  double weighted = 0.0;
  const double hcell = len / static_cast<double>(table_cells);
  for (std::size_t k = 0; k < table_cells; ++k) {
    const double lo = a_ + hcell * static_cast<double>(k);
    base += gauss([&](double y) { return blend_slope(y); }, lo, lo + hcell);
    weighted += gauss([&](double y) { return blend_slope(y) * bump(y); }, lo, lo + hcell);
  }
  const double target = right_.value(c_) - left_.value(a_);
  require(std::abs(weighted) > 0.0, ErrorCode::singular_system, "TransitionBlend: degenerate blend");
  kappa_ = (base - target) / weighted;

  table_h_ = hcell;
  table_.assign(table_cells + 1, 0.0);
  for (std::size_t k = 0; k < table_cells; ++k) {
    const double lo = a_ + hcell * static_cast<double>(k);
    table_[k + 1] = table_[k] + gauss([&](double y) { return slope(y); }, lo, lo + hcell);
  }
}

double TransitionBlend::blend_slope(double y) const {
  const double s = smooth_step((y - a_) / (c_ - a_));
  return (1.0 - s) * left_.slope(y) + s * right_.slope(y);
}

double TransitionBlend::slope(double y) const {
  if (y <= a_) return left_.slope(y);
  if (y >= c_) return right_.slope(y);
  return blend_slope(y) * (1.0 - kappa_ * plateau_bump((y - a_) / (c_ - a_)));
}

double TransitionBlend::value(double y) const {
  if (y <= a_) return left_.value(y);
  if (y >= c_) return right_.value(y);
  const double t = (y - a_) / table_h_;
  auto k = static_cast<std::size_t>(t);
  if (k >= table_cells) k = table_cells - 1;
  const double y0 = a_ + table_h_ * static_cast<double>(k);
  // Cubic Hermite with exact end slopes inside one table cell.
  const double h = table_h_;
  const double u = (y - y0) / h;
  const double p0 = table_[k], p1 = table_[k + 1];
  const double m0 = slope(y0) * h, m1 = slope(y0 + h) * h;
  const double u2 = u * u, u3 = u2 * u;
  const double cum = (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * p1 +
                     (u3 - u2) * m1;
  return left_.value(a_) + cum;
}

}  // namespace gkdv
