#include "gkdv/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gkdv/errors.hpp"
#include "gkdv/ode.hpp"

namespace gkdv::reduced {

namespace {

using Vec4 = ode::Vec<4>;  // lambda, x, b, t

constexpr double third = 1.0 / 3.0;
constexpr double regime_eps = 1e-12;

void check_beta(double beta) {
  require(beta > 0.0 && beta < beta_max, ErrorCode::invalid_argument,
          "beta must lie in (0, 11/20), got " + std::to_string(beta));
}

void check_state(const ReducedState& st) {
  require(std::isfinite(st.lambda) && std::isfinite(st.x) && std::isfinite(st.b), ErrorCode::state_invalid,
          "reduced state has non-finite components");
  require(st.lambda > 0.0, ErrorCode::state_invalid, "reduced state needs lambda > 0");
  require(st.x > 0.0, ErrorCode::state_invalid, "reduced state needs x > 0");
}

Vec4 derivative(double s, const Vec4& y, const RegimeParams& p) {
  const StateDerivative d = rhs({s, y[0], y[1], y[2]}, p);
  return {d.lambda_s, d.x_s, d.b_s, y[0] * y[0] * y[0]};
}

TrajectorySample make_sample(double s, const Vec4& y, const RegimeParams& p) {
  TrajectorySample out;
  out.state = {s, y[0], y[1], y[2]};
  out.t = y[3];
  out.coords = instability_coords(out.state, p);
  return out;
}

bool valid(const Vec4& y) {
  return std::isfinite(y[0]) && std::isfinite(y[1]) && std::isfinite(y[2]) && std::isfinite(y[3]) &&
         y[0] > 0.0 && y[1] > 0.0;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double sse = std::numeric_limits<double>::infinity();
};

LineFit line_fit(std::span<const double> xs, std::span<const double> ys) {
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  LineFit f;
  if (sxx <= 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (f.intercept + f.slope * xs[i]);
    f.sse += r * r;
  }
  return f;
}

// Fit ys against log(offset(delta)) where the offset family is parameterised by
// delta > 0; delta is chosen by a log-scan followed by golden-section search.
template <typename Abscissa>
std::pair<double, LineFit> search_offset(std::span<const double> ys, std::size_t n, double span,
                                         Abscissa abscissa) {
  std::vector<double> xs(n);
  auto evaluate = [&](double log_delta) {
    const double delta = std::exp(log_delta);
    for (std::size_t i = 0; i < n; ++i) xs[i] = std::log(abscissa(i, delta));
    return line_fit(xs, ys);
  };
  const double lo = std::log(span * 1e-9);
  const double hi = std::log(span * 1e4);
  constexpr int scan = 261;
  int best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int k = 0; k < scan; ++k) {
    const double ld = lo + (hi - lo) * k / (scan - 1);
    const double sse = evaluate(ld).sse;
    if (sse < best_sse) {
      best_sse = sse;
      best = k;
    }
  }
  double a = lo + (hi - lo) * std::max(best - 1, 0) / (scan - 1);
  double b = lo + (hi - lo) * std::min(best + 1, scan - 1) / (scan - 1);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = evaluate(c).sse;
  double fd = evaluate(d).sse;
  for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = evaluate(c).sse;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = evaluate(d).sse;
    }
  }
  const double ld = 0.5 * (a + b);
  return {std::exp(ld), evaluate(ld)};
}

}  // namespace

double theta_of_beta(double beta) { return (1.0 - 0.5 * beta) / (1.0 - beta); }

double beta_of_theta(double theta) { return 2.0 * (theta - 1.0) / (2.0 * theta - 1.0); }

double threshold_c0(double theta, double intQ) {
  return -0.5 * intQ * (theta - 1.0) * std::pow(2.0 * theta - 1.0, theta - 1.0);
}

RegimeParams params_from_beta(double beta, double intQ, double s0) {
  check_beta(beta);
  require(intQ > 0.0, ErrorCode::invalid_argument, "params_from_beta: int Q must be positive");
  require(s0 > 1.0, ErrorCode::invalid_argument, "params_from_beta: s0 must exceed 1");
  RegimeParams p;
  p.beta = beta;
  p.theta = theta_of_beta(beta);
  p.c0 = threshold_c0(p.theta, intQ);
  p.intQ = intQ;
  p.s0 = s0;
  return p;
}

double threshold_x(double beta, double s) { return std::pow(s, 1.0 - beta) / (1.0 - beta); }

ReducedState exact_solution(const RegimeParams& p, double s) {
  return {s, std::pow(s, -p.beta), threshold_x(p.beta, s), p.beta / s};
}

StateDerivative rhs(const ReducedState& st, const RegimeParams& p) {
  check_state(st);
  const double k = p.forcing();
  const double lambda = st.lambda;
  const double b = st.b;
  const double x_pow = std::pow(st.x, -p.theta);
  StateDerivative d;
  d.lambda_s = -b * lambda;
  d.x_s = lambda;
  // 0 = d/ds [b/lambda^2 + k lambda^{-3/2} x^{-theta}] with lambda_s/lambda = -b, x_s = lambda.
  d.b_s = -2.0 * b * b +
          k * (-1.5 * b * std::sqrt(lambda) * x_pow + p.theta * lambda * std::sqrt(lambda) * x_pow / st.x);
  return d;
}

InstabilityCoords instability_coords(const ReducedState& st, const RegimeParams& p) {
  check_state(st);
  InstabilityCoords c;
  const double k = p.forcing();
  c.g = st.b / (st.lambda * st.lambda) + k * std::pow(st.lambda, -1.5) * std::pow(st.x, -p.theta);
  c.f = std::sqrt(st.lambda) + 2.0 * p.c0 / (p.intQ * (p.theta - 1.0)) * std::pow(st.x, 1.0 - p.theta);
  c.F = c.f * std::pow(st.s, 0.5 * p.beta + 0.1);
  c.G = c.g * std::pow(st.s, 1.0 - 2.0 * p.beta + 0.2);
  c.H = c.F * c.F + c.G * c.G;
  return c;
}

std::string_view to_string(TrajectoryStatus status) {
  switch (status) {
    case TrajectoryStatus::completed: return "completed";
    case TrajectoryStatus::exited: return "exited";
    case TrajectoryStatus::halted: return "halted";
  }
  return "unknown";
}

ReducedTrajectory integrate(const ReducedState& initial, const RegimeParams& params, double s_end, double tol,
                            const IntegrateOptions& options) {
  require(tol > 0.0, ErrorCode::invalid_argument, "integrate: tol must be positive");
  require(s_end > initial.s && initial.s > 0.0, ErrorCode::invalid_argument,
          "integrate: need 0 < s_initial < s_end");
  require(options.samples >= 2, ErrorCode::invalid_argument, "integrate: need at least 2 output samples");
  check_state(initial);

  ReducedTrajectory traj;
  traj.params = params;
  const auto f = [&params](double s, const Vec4& y) { return derivative(s, y, params); };
  const ode::DormandPrince<4, decltype(f)> dp{f};
  const Vec4 floor{1e-300, 1e-300, 1e-300, 1e-12};

  double s = initial.s;
  Vec4 y{initial.lambda, initial.x, initial.b, 0.0};
  traj.samples.push_back(make_sample(s, y, params));
  if (options.stop_at_exit && traj.samples.front().coords.H >= 1.0) {
    traj.status = TrajectoryStatus::exited;
    traj.exit = traj.samples.front();
    return traj;
  }

  const double log_ratio = std::log(s_end / initial.s);
  double h = std::min(1e-3 * initial.s, 0.5 * (s_end - initial.s));
  for (std::size_t k = 1; k < options.samples; ++k) {
    const double target = (k + 1 == options.samples)
                              ? s_end
                              : initial.s * std::exp(log_ratio * static_cast<double>(k) /
                                                     static_cast<double>(options.samples - 1));
    while (s < target) {
      const bool clipped = h >= target - s;
      const double h_try = clipped ? target - s : h;
      const auto attempt = dp.step(s, y, h_try);
      const double err = ode::error_norm(attempt.err, y, attempt.y, tol, floor);
      if (err > 1.0 || !std::isfinite(err)) {
        ++traj.rejected_steps;
        h = ode::next_step(h_try, std::isfinite(err) ? err : 1e10);
        if (h < options.min_step * s) {
          traj.status = TrajectoryStatus::halted;
          traj.halt_reason = "step underflow at s = " + std::to_string(s);
          return traj;
        }
        continue;
      }
      if (!valid(attempt.y)) {
        traj.status = TrajectoryStatus::halted;
        traj.halt_reason = "lambda or x left positivity near s = " + std::to_string(s + h_try);
        return traj;
      }
      ++traj.accepted_steps;
      const double s_prev = s;
      const Vec4 y_prev = y;
      s = clipped ? target : s + h_try;
      y = attempt.y;
      const double h_next = ode::next_step(h_try, err);
      h = clipped ? std::max(h, h_next) : h_next;

      if (options.stop_at_exit && instability_coords({s, y[0], y[1], y[2]}, params).H >= 1.0) {
        double lo = s_prev, hi = s;
        Vec4 y_hi = y;
        while (hi - lo > std::max(options.exit_tolerance, 4e-16 * hi)) {
          const double mid = 0.5 * (lo + hi);
          const Vec4 y_mid = dp.step(s_prev, y_prev, mid - s_prev).y;
          if (instability_coords({mid, y_mid[0], y_mid[1], y_mid[2]}, params).H >= 1.0) {
            hi = mid;
            y_hi = y_mid;
          } else {
            lo = mid;
          }
        }
        traj.exit = make_sample(hi, y_hi, params);
        traj.samples.push_back(*traj.exit);
        traj.status = TrajectoryStatus::exited;
        return traj;
      }
    }
    traj.samples.push_back(make_sample(s, y, params));
  }
  traj.status = TrajectoryStatus::completed;
  return traj;
}

std::vector<TimeSample> convert_time(const ReducedTrajectory& traj) {
  std::vector<TimeSample> out;
  out.reserve(traj.samples.size());
  for (const auto& smp : traj.samples) out.push_back({smp.t, smp.state.lambda});
  return out;
}

std::vector<TimeSample> fit_window(const ReducedTrajectory& traj) {
  std::vector<TimeSample> out;
  if (traj.samples.empty()) return out;
  const double s_first = traj.samples.front().state.s;
  const double s_last = traj.samples.back().state.s;
  const double lo = std::max(s_last / 10.0, s_first + 0.2 * (s_last - s_first));
  for (const auto& smp : traj.samples) {
    if (smp.state.s >= lo) out.push_back({smp.t, smp.state.lambda});
  }
  return out;
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::finite_time_blowup: return "finite-time-blowup";
    case Regime::exponential_growup: return "exponential-growup";
    case Regime::power_growup: return "power-growup";
  }
  return "unknown";
}

RegimeReport classify_regime(double beta) {
  check_beta(beta);
  RegimeReport r;
  if (std::abs(beta - third) <= regime_eps) {
    r.regime = Regime::exponential_growup;
    r.predicted_exponent = third;
  } else if (beta > third) {
    r.regime = Regime::finite_time_blowup;
    r.predicted_exponent = beta / (3.0 * beta - 1.0);
  } else {
    r.regime = Regime::power_growup;
    r.predicted_exponent = beta / (1.0 - 3.0 * beta);
  }
  return r;
}

RegimeReport fit_exponent(std::span<const TimeSample> series, const RegimeReport& skeleton) {
  require(series.size() >= 20, ErrorCode::insufficient_samples,
          "fit_exponent: need at least 20 samples, got " + std::to_string(series.size()));
  for (std::size_t i = 0; i < series.size(); ++i) {
    require(std::isfinite(series[i].t) && series[i].lambda > 0.0, ErrorCode::fit_refused,
            "fit_exponent: non-finite time or non-positive lambda");
    if (i > 0) {
      require(series[i].t > series[i - 1].t, ErrorCode::fit_refused, "fit_exponent: time not increasing");
      require(series[i].lambda < series[i - 1].lambda, ErrorCode::fit_refused,
              "fit_exponent: lambda is not monotone decreasing");
    }
  }
  const std::size_t n = series.size();
  RegimeReport r = skeleton;
  r.samples_used = n;
  const double t_min = series.front().t;
  const double t_max = series.back().t;
  const double span = t_max - t_min;

  std::vector<double> log_lambda(n);
  for (std::size_t i = 0; i < n; ++i) log_lambda[i] = std::log(series[i].lambda);

  switch (skeleton.regime) {
    case Regime::exponential_growup: {
      std::vector<double> ts(n);
      for (std::size_t i = 0; i < n; ++i) ts[i] = series[i].t;
      const LineFit fit = line_fit(ts, log_lambda);
      r.fitted_exponent = -fit.slope;
      r.T_or_rate = -fit.slope;
      r.fit_rms = std::sqrt(fit.sse / static_cast<double>(n));
      break;
    }
    case Regime::finite_time_blowup: {
      // log lambda = a + nu log(T - t)
      auto [delta, fit] = search_offset(log_lambda, n, span,
                                        [&](std::size_t i, double d) { return t_max + d - series[i].t; });
      r.fitted_exponent = fit.slope;
      r.T_or_rate = t_max + delta;
      r.fit_rms = std::sqrt(fit.sse / static_cast<double>(n));
      break;
    }
    case Regime::power_growup: {
      // log(1/lambda) = a + nu log(t - t_origin)
      std::vector<double> log_inv(n);
      for (std::size_t i = 0; i < n; ++i) log_inv[i] = -log_lambda[i];
      auto [delta, fit] = search_offset(log_inv, n, span,
                                        [&](std::size_t i, double d) { return series[i].t - t_min + d; });
      r.fitted_exponent = fit.slope;
      r.T_or_rate = t_min - delta;
      r.fit_rms = std::sqrt(fit.sse / static_cast<double>(n));
      break;
    }
  }
  return r;
}

}  // namespace gkdv::reduced
