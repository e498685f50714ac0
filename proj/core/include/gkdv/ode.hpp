#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace gkdv::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

/// Dormand-Prince 5(4) pair. The fifth-order solution is propagated; the
/// embedded fourth-order solution only feeds the error estimate.
template <std::size_t N, typename Rhs>
struct DormandPrince {
  Rhs rhs;

  struct Attempt {
    Vec<N> y;
    Vec<N> err;
  };

  Attempt step(double t, const Vec<N>& y, double h) const {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                            a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    auto axpy = [&](std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
      Vec<N> out = y;
      for (const auto& [c, k] : terms)
        for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
      return out;
    };

    const Vec<N> k1 = rhs(t, y);
    const Vec<N> k2 = rhs(t + h / 5.0, axpy({{a21, &k1}}));
    const Vec<N> k3 = rhs(t + 3.0 * h / 10.0, axpy({{a31, &k1}, {a32, &k2}}));
    const Vec<N> k4 = rhs(t + 4.0 * h / 5.0, axpy({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Vec<N> k5 = rhs(t + 8.0 * h / 9.0, axpy({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Vec<N> k6 = rhs(t + h, axpy({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const Vec<N> y5 = axpy({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const Vec<N> k7 = rhs(t + h, y5);

    Attempt a{y5, {}};
    for (std::size_t i = 0; i < N; ++i) {
      a.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
    return a;
  }
};

/// Mixed error norm: max_i |err_i| / (tol * (max(|y_i|, |y_new_i|) + floor_i)).
template <std::size_t N>
double error_norm(const Vec<N>& err, const Vec<N>& y, const Vec<N>& y_new, double tol, const Vec<N>& floor) {
  double m = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double scale = tol * (std::max(std::abs(y[i]), std::abs(y_new[i])) + floor[i]);
    m = std::max(m, std::abs(err[i]) / scale);
  }
  return m;
}

/// Standard step-size update for a fifth-order method.
inline double next_step(double h, double err) {
  const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
  return h * factor;
}

/// Cubic Hermite interpolation between two accepted states.
template <std::size_t N>
Vec<N> hermite(double t0, const Vec<N>& y0, const Vec<N>& f0, double t1, const Vec<N>& y1, const Vec<N>& f1,
               double t) {
  const double h = t1 - t0;
  const double u = (t - t0) / h;
  const double u2 = u * u, u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u, h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
  Vec<N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
  return out;
}

}  // namespace gkdv::ode
