#include "gkdv/modulation.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "gkdv/errors.hpp"
#include "gkdv/smooth.hpp"

namespace gkdv::modulation {

namespace {

using Branch = TransitionBlend::Branch;

const Branch exp_branch{[](double y) { return std::exp(y); }, [](double y) { return std::exp(y); }};
const Branch exp2_branch{[](double y) { return std::exp(2.0 * y); }, [](double y) { return 2.0 * std::exp(2.0 * y); }};
const Branch affine_branch{[](double y) { return 1.0 + y; }, [](double) { return 1.0; }};
const Branch one_branch{[](double) { return 1.0; }, [](double) { return 0.0; }};

Branch power_branch(int i) {
  return {[i](double y) { return std::pow(y, i); }, [i](double y) { return i * std::pow(y, i - 1); }};
}

struct PhiBlends {
  TransitionBlend left{-1.0, -0.5, exp_branch, affine_branch};
  TransitionBlend right1{0.5, 2.0, affine_branch, power_branch(1)};
  TransitionBlend right2{0.5, 2.0, affine_branch, power_branch(2)};
  TransitionBlend psi{-1.0, -0.5, exp2_branch, one_branch};
};

const PhiBlends& blends() {
  static const PhiBlends b;
  return b;
}

const TransitionBlend& right_blend(int i) {
  require(i == 1 || i == 2, ErrorCode::invalid_argument, "phi: index must be 1 or 2");
  return i == 1 ? blends().right1 : blends().right2;
}

double eps_inner(const GridFunction& eps, const std::function<double(double)>& f) {
  std::vector<double> v(eps.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = eps[j] * f(eps.y(j));
  return integrate(v, eps.grid().spacing());
}

double ylq(double y) { return y * profiles::lambda_q_value(y); }

double max_abs(const std::array<double, 3>& r) {
  return std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
}

// Sampling context reused across Newton iterations on a fixed grid.
struct Frame {
  const FrameSampler& sampler;
  const profiles::ProfileSet& profiles;
  GridSpec grid;
  GridFunction Y0;
  std::vector<double> w_ylq, w_lq, w_q;  // direction samples times quadrature-ready values

  Frame(const FrameSampler& s, const profiles::ProfileSet& p, const GridSpec& g)
      : sampler(s), profiles(p), grid(g), Y0(p.Y0_on(g)) {}

  GridFunction eps(const ModulationState& st) const {
    const double root = std::sqrt(st.lambda);
    const auto qb = profiles::build_Qb(st.b, grid, profiles);
    const pde::DomainSpec& d = sampler.domain();
    const double lo = st.x + st.lambda * grid.y_min;
    const double hi = st.x + st.lambda * grid.y_max;
    require(lo >= d.x_min && hi <= d.x_max, ErrorCode::interpolation_range,
            fmt::format("remainder: frame image [{}, {}] leaves the box [{}, {})", lo, hi, d.x_min, d.x_max));
    std::vector<double> v(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) {
      const double y = grid.node(j);
      v[j] = root * sampler.w(st.lambda * y + st.x) - qb[j] - st.p * Y0[j];
    }
    return GridFunction(grid, std::move(v));
  }

  ModulationState with(const ModulationState& st, double b, double lambda, double x) const {
    ModulationState out = st;
    out.b = b;
    out.lambda = lambda;
    out.x = x;
    out.p = std::sqrt(lambda) * sampler.q0(x);
    return out;
  }

  std::array<double, 3> residual(const ModulationState& st) const { return orthogonality(eps(st)); }
};

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 fd_jacobian(const Frame& frame, const ModulationState& st, double fd_step) {
  const double hb = fd_step;
  const double hl = fd_step * st.lambda;
  const double hx = fd_step * st.lambda;
  Mat3 J{};
  const std::array<double, 3> h{hb, hl, hx};
  for (int c = 0; c < 3; ++c) {
    std::array<double, 3> plus{st.b, st.lambda, st.x}, minus = plus;
    plus[c] += h[c];
    minus[c] -= h[c];
    const auto rp = frame.residual(frame.with(st, plus[0], plus[1], plus[2]));
    const auto rm = frame.residual(frame.with(st, minus[0], minus[1], minus[2]));
    for (int r = 0; r < 3; ++r) J[r][c] = (rp[r] - rm[r]) / (2.0 * h[c]);
  }
  return J;
}

}  // namespace

double phi(int i, double y) {
  const auto& rb = right_blend(i);
  return y <= -0.5 ? blends().left.value(y) : rb.value(y);
}

double phi_slope(int i, double y) {
  const auto& rb = right_blend(i);
  return y <= -0.5 ? blends().left.slope(y) : rb.slope(y);
}

double psi(double y) { return blends().psi.value(y); }
double psi_slope(double y) { return blends().psi.slope(y); }

GridSpec weight_grid(double B, double h) { return GridSpec::with_spacing(-10.0 * B, 10.0 * B, h); }

WeightSet build_weights(double B, const GridSpec& grid) {
  require(B > 100.0, ErrorCode::invalid_argument, "build_weights: B must exceed 100");
  grid.validate();
  require(grid.y_min <= -10.0 * B && grid.y_max >= 10.0 * B, ErrorCode::domain_too_small,
          fmt::format("build_weights: grid [{}, {}] must cover [-10B, 10B] = [{}, {}]", grid.y_min, grid.y_max,
                      -10.0 * B, 10.0 * B));
  WeightSet w;
  w.B = B;
  w.grid = grid;
  const double inv = 1.0 / B;
  w.psi_B = GridFunction::sample(grid, [inv](double y) { return psi(y * inv); });
  w.phi1_B = GridFunction::sample(grid, [inv](double y) { return phi(1, y * inv); });
  w.phi2_B = GridFunction::sample(grid, [inv](double y) { return phi(2, y * inv); });
  w.dpsi_B = GridFunction::sample(grid, [inv](double y) { return psi_slope(y * inv) * inv; });
  w.dphi1_B = GridFunction::sample(grid, [inv](double y) { return phi_slope(1, y * inv) * inv; });
  w.dphi2_B = GridFunction::sample(grid, [inv](double y) { return phi_slope(2, y * inv) * inv; });
  return w;
}

NormReport norms(const GridFunction& eps, const WeightSet& weights) {
  require_same_grid(eps, weights.psi_B);
  const auto dy = derivative(eps);
  NormReport r;
  const double kinetic = integrate(dy * dy * weights.psi_B);
  const auto e2 = eps * eps;
  r.N1 = kinetic + integrate(e2 * weights.phi1_B);
  r.N2 = kinetic + integrate(e2 * weights.phi2_B);
  r.N1_loc = integrate(e2 * weights.dphi1_B);
  r.N2_loc = integrate(e2 * weights.dphi2_B);
  return r;
}

double lyapunov_F(const GridFunction& eps, const ModulationState& st, const GridFunction& q, const WeightSet& weights,
                  int i, const profiles::ProfileSet& profiles) {
  require(i == 1 || i == 2, ErrorCode::invalid_argument, "lyapunov_F: index must be 1 or 2");
  require_same_grid(eps, weights.psi_B);
  require_same_grid(q, eps);
  const GridSpec& g = eps.grid();
  const auto qb = profiles::build_Qb(st.b, g, profiles);
  const auto y0 = profiles.Y0_on(g);
  const auto dy = derivative(eps);
  const auto& phi_B = i == 1 ? weights.phi1_B : weights.phi2_B;
  std::vector<double> integrand(g.n);
  for (std::size_t j = 0; j < g.n; ++j) {
    const double e = eps[j];
    const double Q = profiles::q_value(g.node(j));
    const double py = st.p * y0[j];
    const double V = qb[j] + py + q[j];
    const double V2 = V * V;
    const double W = V + e;
    const double W2 = W * W;
    const double qb2 = qb[j] * qb[j];
    const double q2 = q[j] * q[j];
    const double Q2 = Q * Q;
    const double potential =
        W2 * W2 * W2 - V2 * V2 * V2 - 6.0 * e * (qb2 * qb2 * qb[j] + q2 * q2 * q[j] + 5.0 * Q2 * Q2 * (py + q[j]));
    integrand[j] = dy[j] * dy[j] * weights.psi_B[j] + e * e * phi_B[j] - potential * weights.psi_B[j] / 3.0;
  }
  return integrate(integrand, g.spacing());
}

FrameSampler::FrameSampler(const pde::Field& u, const pde::Field& q0, std::size_t upsample)
    : w_((u - q0).values(), u.domain().x_min, u.domain().length(), upsample),
      q0_(q0.values(), q0.domain().x_min, q0.domain().length(), upsample),
      t_(u.t()),
      domain_(u.domain()) {}

GridFunction remainder(const FrameSampler& frame, const ModulationState& state, const GridSpec& grid,
                       const profiles::ProfileSet& profiles) {
  return Frame(frame, profiles, grid).eps(state);
}

GridFunction frame_tail(const FrameSampler& frame, const ModulationState& st, const GridSpec& grid) {
  const pde::DomainSpec& d = frame.domain();
  require(st.x + st.lambda * grid.y_min >= d.x_min && st.x + st.lambda * grid.y_max <= d.x_max,
          ErrorCode::interpolation_range, "frame_tail: frame image leaves the box");
  const double root = std::sqrt(st.lambda);
  return GridFunction::sample(grid, [&](double y) { return root * frame.q0(st.lambda * y + st.x); });
}

std::array<double, 3> orthogonality(const GridFunction& eps) {
  return {eps_inner(eps, ylq), eps_inner(eps, profiles::lambda_q_value), eps_inner(eps, profiles::q_value)};
}

GridFunction orthogonalize(const GridFunction& v) {
  const GridSpec& g = v.grid();
  const std::array<GridFunction, 3> dirs{GridFunction::sample(g, ylq), profiles::lambda_q(g), profiles::ground_state(g)};
  Eigen::Matrix3d G;
  Eigen::Vector3d rhs;
  for (int a = 0; a < 3; ++a) {
    rhs(a) = inner(v, dirs[a]);
    for (int b = 0; b < 3; ++b) G(a, b) = inner(dirs[a], dirs[b]);
  }
  const Eigen::Vector3d c = G.ldlt().solve(rhs);
  return v - (c(0) * dirs[0] + c(1) * dirs[1] + c(2) * dirs[2]);
}

double local_norm(const GridFunction& eps) {
  return integrate(eps.map([](double y, double e) { return e * e * std::exp(-std::abs(y) / 10.0); }));
}

Decomposition decompose(const FrameSampler& sampler, const ModulationState& guess,
                        const profiles::ProfileSet& profiles, const DecomposeOptions& options) {
  require(guess.lambda > 0.0 && std::isfinite(guess.lambda) && std::isfinite(guess.x) && std::isfinite(guess.b),
          ErrorCode::invalid_argument, "decompose: guess needs lambda > 0 and finite parameters");
  require(options.tol > 0.0 && options.max_iter > 0, ErrorCode::invalid_argument, "decompose: bad options");
  const GridSpec grid = options.grid.value_or(profiles.grid);
  const Frame frame(sampler, profiles, grid);

  ModulationState st = frame.with(guess, guess.b, guess.lambda, guess.x);
  st.t = sampler.t();
  GridFunction eps = frame.eps(st);
  const double q_norm = std::sqrt(profiles.intQ2);
  Decomposition out;
  out.initial_eps_norm = std::sqrt(inner(eps, eps));
  require(out.initial_eps_norm < options.alpha_star * q_norm, ErrorCode::decomposition_failed,
          fmt::format("decompose: initial remainder norm {:.3e} outside the admission tube {:.3e}",
                      out.initial_eps_norm, options.alpha_star * q_norm));

  auto r = orthogonality(eps);
  double last_step = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  // Converged once the residuals meet tol and the last update is at roundoff scale.
  while (max_abs(r) >= options.tol || (it > 0 && last_step > 1e-11 && max_abs(r) > 1e-3 * options.tol)) {
    if (it >= options.max_iter) {
      fail(ErrorCode::decomposition_failed,
           fmt::format("decompose: no convergence after {} iterations, residual {:.3e}", it, max_abs(r)));
    }
    const Mat3 J = fd_jacobian(frame, st, options.fd_step);
    Eigen::Matrix3d A;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) A(a, b) = J[a][b];
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(A);
    const auto sv = svd.singularValues();
    require(sv(2) > 1e-12 * sv(0) && sv(2) > 0.0, ErrorCode::degenerate_configuration,
            fmt::format("decompose: singular Jacobian (condition {:.3e})", sv(0) / sv(2)));
    const Eigen::Vector3d delta = A.partialPivLu().solve(-Eigen::Vector3d(r[0], r[1], r[2]));

    // Damped update: halve until the residual decreases and lambda stays positive.
    double damp = 1.0;
    ModulationState trial;
    std::array<double, 3> r_trial{};
    bool accepted = false;
    for (int k = 0; k < 30; ++k, damp *= 0.5) {
      const double lambda = st.lambda + damp * delta(1);
      if (!(lambda > 0.0)) continue;
      try {
        trial = frame.with(st, st.b + damp * delta(0), lambda, st.x + damp * delta(2));
        r_trial = frame.residual(trial);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::interpolation_range) continue;
        throw;
      }
      if (max_abs(r_trial) < max_abs(r) || max_abs(r) < options.tol) {
        accepted = true;
        break;
      }
    }
    ++it;
    if (!accepted) {
      if (max_abs(r) < options.tol) break;
      fail(ErrorCode::decomposition_failed,
           fmt::format("decompose: line search failed at iteration {}, residual {:.3e}", it, max_abs(r)));
    }
    last_step = damp * std::max({std::abs(delta(0)), std::abs(delta(1)) / st.lambda, std::abs(delta(2)) / st.lambda});
    st = trial;
    r = r_trial;
  }
  out.state = st;
  out.eps = frame.eps(st);
  out.residuals = orthogonality(out.eps);
  out.iterations = it;
  return out;
}

Decomposition decompose(const pde::Field& u, const pde::Field& q0, const ModulationState& guess,
                        const profiles::ProfileSet& profiles, const DecomposeOptions& options) {
  require(u.domain() == q0.domain(), ErrorCode::grid_mismatch, "decompose: u and q0 on different domains");
  const FrameSampler sampler(u, q0);
  return decompose(sampler, guess, profiles, options);
}

std::array<std::array<double, 3>, 3> jacobian(const FrameSampler& sampler, const ModulationState& state,
                                              const profiles::ProfileSet& profiles, const GridSpec& grid,
                                              double fd_step) {
  const Frame frame(sampler, profiles, grid);
  return fd_jacobian(frame, frame.with(state, state.b, state.lambda, state.x), fd_step);
}

std::array<std::array<double, 3>, 3> trivial_jacobian(const profiles::ProfileSet& p) {
  // d eps/db = -P, d eps/dlambda = Lambda Q, d eps/dx = Q'.
  const GridSpec& g = p.grid;
  const auto ylq_f = GridFunction::sample(g, ylq);
  const std::array<const GridFunction*, 3> rows{&ylq_f, &p.LambdaQ, &p.Q};
  Mat3 J{};
  for (int r = 0; r < 3; ++r) {
    J[r][0] = -inner(p.P, *rows[r]);
    J[r][1] = inner(p.LambdaQ, *rows[r]);
    J[r][2] = inner(p.dQ, *rows[r]);
  }
  return J;
}

ResidualReport modulation_residuals(std::span<const TrajectoryPoint> pts, double c0, double theta, double intQ) {
  const std::size_t n = pts.size();
  require(n >= 3, ErrorCode::insufficient_samples, "modulation_residuals: need at least 3 states");
  const double h = pts[1].state.t - pts[0].state.t;
  require(h > 0.0, ErrorCode::invalid_argument, "modulation_residuals: times must increase");
  for (std::size_t i = 1; i < n; ++i) {
    require(std::abs((pts[i].state.t - pts[i - 1].state.t) - h) <= 1e-9 * h, ErrorCode::invalid_argument,
            "modulation_residuals: times must be uniformly spaced");
    require(pts[i].state.lambda > 0.0 && pts[i].state.x > 0.0, ErrorCode::state_invalid,
            "modulation_residuals: need lambda > 0 and x > 0");
  }
  std::vector<double> lam(n), x(n), b(n), g(n), inv3(n), s(n);
  const double k = 4.0 * c0 / intQ;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& st = pts[i].state;
    lam[i] = st.lambda;
    x[i] = st.x;
    b[i] = st.b;
    g[i] = st.b / (st.lambda * st.lambda) + k * std::pow(st.lambda, -1.5) * std::pow(st.x, -theta);
    inv3[i] = 1.0 / (st.lambda * st.lambda * st.lambda);
  }
  // s(t): Simpson on pairs of panels, a three-point rule for a trailing odd panel.
  s[0] = pts[0].state.s;
  for (std::size_t i = 1; i < n; ++i) {
    if (i % 2 == 0) {
      s[i] = s[i - 2] + h / 3.0 * (inv3[i - 2] + 4.0 * inv3[i - 1] + inv3[i]);
    } else if (i + 1 < n) {
      s[i] = s[i - 1] + h / 12.0 * (5.0 * inv3[i - 1] + 8.0 * inv3[i] - inv3[i + 1]);
    } else {
      s[i] = s[i - 1] + h / 12.0 * (-inv3[i - 2] + 8.0 * inv3[i - 1] + 5.0 * inv3[i]);
    }
  }
  const bool fourth = n >= 5;
  const std::size_t edge = fourth ? 2 : 1;
  auto ddt = [&](const std::vector<double>& f, std::size_t i) {
    if (fourth) return (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    return (f[i + 1] - f[i - 1]) / (2.0 * h);
  };

  ResidualReport rep;
  for (std::size_t i = edge; i + edge < n; ++i) {
    const auto& p = pts[i];
    const double l3 = lam[i] * lam[i] * lam[i];
    ResidualSample r;
    r.t = p.state.t;
    r.s = s[i];
    r.lambda_res = std::abs(l3 * ddt(lam, i) / lam[i] + b[i]);
    r.x_res = std::abs(l3 * ddt(x, i) / lam[i] - 1.0);
    r.b_s = l3 * ddt(b, i);
    r.g = g[i];
    r.g_s = l3 * ddt(g, i);
    r.bound = std::sqrt(std::max(p.N2_loc, 0.0)) + 1.0 / (s[i] * s[i]);
    const double pa = std::abs(p.state.p);
    const double E = std::max(p.local, 0.0);
    r.modulation_bound = std::sqrt(E) + b[i] * b[i] + pa * pa + lam[i] * pa / x[i];
    r.g_bound = (std::pow(std::abs(b[i]), 3) + pa * pa * pa + (std::abs(b[i]) + pa) * std::sqrt(E) + E +
                 lam[i] * lam[i] * pa / (x[i] * x[i]) + lam[i] * pa / (x[i] * x[i] * x[i])) /
                (lam[i] * lam[i]);
    rep.max_ratio = std::max(rep.max_ratio, std::max(r.lambda_res, r.x_res) / r.bound);
    rep.max_modulation_ratio = std::max(rep.max_modulation_ratio, std::max(r.lambda_res, r.x_res) / r.modulation_bound);
    rep.samples.push_back(r);
  }
  const auto& ss = rep.samples;
  rep.g_drift = ss.back().g - ss.front().g;
  for (std::size_t i = 1; i < ss.size(); ++i) {
    rep.g_integrated_bound += 0.5 * (ss[i].g_bound + ss[i - 1].g_bound) * (ss[i].s - ss[i - 1].s);
  }
  rep.g_ratio = rep.g_integrated_bound > 0.0 ? std::abs(rep.g_drift) / rep.g_integrated_bound
                                             : (rep.g_drift == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  return rep;
}

}  // namespace gkdv::modulation
