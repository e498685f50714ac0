#include "gkdv/full_model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "gkdv/errors.hpp"

namespace gkdv::full {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// s at each uniformly spaced sample, same quadrature as the residual report.
double next_s(const std::vector<FullSample>& samples, double lambda_new, double h) {
  const std::size_t i = samples.size();
  auto inv3 = [](double l) { return 1.0 / (l * l * l); };
  if (i >= 2) {
    return samples[i - 2].state.s +
           h / 3.0 * (inv3(samples[i - 2].state.lambda) + 4.0 * inv3(samples[i - 1].state.lambda) + inv3(lambda_new));
  }
  return samples[i - 1].state.s + 0.5 * h * (inv3(samples[i - 1].state.lambda) + inv3(lambda_new));
}

double edge_amplitude(const pde::Field& u, const pde::Field& q0) {
  const auto& d = u.domain();
  const double band = 0.05 * d.length();
  double m = 0.0;
  for (std::size_t j = 0; j < d.n; ++j) {
    const double x = d.node(j);
    if (x < d.x_min + band || x > d.x_max - band) m = std::max(m, std::abs(u[j] - q0[j]));
  }
  return m;
}

}  // namespace

std::string_view to_string(FullStatus status) {
  switch (status) {
    case FullStatus::completed: return "completed";
    case FullStatus::exited: return "exited";
    case FullStatus::truncated: return "truncated";
  }
  return "unknown";
}

FullRun run(const FullConfig& cfg, const profiles::ProfileSet& profiles,
            const std::function<void(const FullSample&)>& on_sample) {
  require(cfg.snapshot_dt > 0.0 && cfg.t_max > 0.0, ErrorCode::invalid_argument,
          "full model: snapshot_dt and t_max must be positive");
  require(cfg.lambda_stop_ratio > 0.0 && cfg.lambda_stop_ratio < 1.0, ErrorCode::invalid_argument,
          "full model: lambda_stop_ratio must lie in (0, 1)");
  FullRun out;
  out.config = cfg;
  out.params = reduced::params_from_beta(cfg.beta, profiles.intQ, cfg.s0);
  const auto& P = out.params;
  const auto threshold = reduced::exact_solution(P, cfg.s0);
  const double lambda0 = cfg.lambda0.value_or(threshold.lambda);
  const double b0 = cfg.b0.value_or(threshold.b);
  const double x0 = threshold.x;

  const pde::TailSpec tail{P.c0, P.theta, x0, cfg.cutoff_start, cfg.cutoff_width};
  pde::Field q0 = pde::build_tail(tail, cfg.domain);
  pde::Field u = pde::compose_initial_data({lambda0, b0, x0, nullptr}, q0, profiles);

  const auto wgrid = modulation::weight_grid(cfg.B, cfg.weight_h);
  const auto weights = modulation::build_weights(cfg.B, wgrid);
  pde::GkdvSolver solver(cfg.domain, cfg.solver);
  pde::GkdvSolver tail_solver(cfg.domain, cfg.solver);

  modulation::ModulationState guess{cfg.s0, 0.0, lambda0, x0, b0, 0.0};
  const auto c_init = pde::conserved(u);
  const double tail_mass0 = pde::conserved(q0).mass;
  const double e_scale = std::max(std::abs(c_init.energy), c_init.kinetic);

  auto measure = [&](const pde::Field& uf, const pde::Field& qf, double s) {
    const modulation::FrameSampler frame(uf, qf);
    modulation::ModulationState g = guess;
    g.s = s;
    const auto dec = modulation::decompose(frame, g, profiles, cfg.decompose);
    FullSample smp;
    smp.state = dec.state;
    smp.state.s = s;
    smp.orthogonality = dec.residuals;
    smp.iterations = dec.iterations;
    smp.local = modulation::local_norm(dec.eps);
    const double lo = smp.state.x + smp.state.lambda * wgrid.y_min;
    const double hi = smp.state.x + smp.state.lambda * wgrid.y_max;
    if (lo >= cfg.domain.x_min && hi <= cfg.domain.x_max) {
      const auto eps_w = modulation::remainder(frame, smp.state, wgrid, profiles);
      const auto q_w = modulation::frame_tail(frame, smp.state, wgrid);
      smp.norms = modulation::norms(eps_w, weights);
      smp.norms.F1 = modulation::lyapunov_F(eps_w, smp.state, q_w, weights, 1, profiles);
      smp.norms.F2 = modulation::lyapunov_F(eps_w, smp.state, q_w, weights, 2, profiles);
    } else {
      smp.norms = {nan, nan, nan, nan, nan, nan};
    }
    smp.conserved = pde::conserved(uf);
    smp.edge_amplitude = edge_amplitude(uf, qf);
    if (smp.state.x > 0.0) {
      smp.coords = reduced::instability_coords({s, smp.state.lambda, smp.state.x, smp.state.b}, P);
    } else {
      smp.coords = {nan, nan, nan, nan, nan};
    }
    return smp;
  };

  auto record = [&](FullSample smp) {
    out.mass_drift = std::max(out.mass_drift, std::abs(smp.conserved.mass / c_init.mass - 1.0));
    out.energy_drift = std::max(out.energy_drift, std::abs(smp.conserved.energy - c_init.energy) / e_scale);
    out.samples.push_back(smp);
    if (on_sample) on_sample(out.samples.back());
  };

  try {
    record(measure(u, q0, cfg.s0));
  } catch (const Error& e) {
    out.status = FullStatus::truncated;
    out.reason = fmt::format("initial decomposition failed: {}", e.what());
    return out;
  }

  const std::size_t max_snapshots = static_cast<std::size_t>(std::ceil(cfg.t_max / cfg.snapshot_dt - 1e-9));
  for (std::size_t k = 1; k <= max_snapshots; ++k) {
    const double t_next = cfg.snapshot_dt * static_cast<double>(k);
    try {
      u = solver.advance(u, t_next);
      q0 = tail_solver.advance(q0, t_next);
    } catch (const pde::BlowUpDetected& e) {
      out.status = FullStatus::truncated;
      out.reason = fmt::format("PDE failure: {}", e.what());
      break;
    }
    out.tail_mass_drift = std::max(out.tail_mass_drift, std::abs(pde::conserved(q0).mass / tail_mass0 - 1.0));

    // Guess: linear extrapolation of the last two decompositions.
    const auto& last = out.samples.back().state;
    guess = last;
    if (out.samples.size() >= 2) {
      const auto& prev = out.samples[out.samples.size() - 2].state;
      guess.lambda = std::max(2.0 * last.lambda - prev.lambda, 0.5 * last.lambda);
      guess.x = 2.0 * last.x - prev.x;
      guess.b = 2.0 * last.b - prev.b;
    }
    FullSample smp;
    try {
      const double s_guess = next_s(out.samples, guess.lambda, cfg.snapshot_dt);
      smp = measure(u, q0, s_guess);
      // Recompute s with the decomposed lambda.
      smp.state.s = next_s(out.samples, smp.state.lambda, cfg.snapshot_dt);
      if (smp.state.x > 0.0) {
        smp.coords = reduced::instability_coords({smp.state.s, smp.state.lambda, smp.state.x, smp.state.b}, P);
      }
    } catch (const Error& e) {
      out.status = FullStatus::truncated;
      out.reason = fmt::format("decomposition failed at t = {}: {}", t_next, e.what());
      break;
    }
    out.steps = solver.steps_taken();
    const FullSample before = out.samples.back();
    record(smp);

    if (cfg.stop_at_exit && std::isfinite(smp.coords.H) && smp.coords.H >= 1.0) {
      // Linear interpolation in s to H = 1.
      const double h0 = before.coords.H, h1 = smp.coords.H;
      const double a = (std::isfinite(h0) && h1 > h0) ? std::clamp((1.0 - h0) / (h1 - h0), 0.0, 1.0) : 1.0;
      FullSample ex = smp;
      auto mix = [a](double p, double q) { return p + a * (q - p); };
      ex.state.s = mix(before.state.s, smp.state.s);
      ex.state.t = mix(before.state.t, smp.state.t);
      ex.state.lambda = mix(before.state.lambda, smp.state.lambda);
      ex.state.x = mix(before.state.x, smp.state.x);
      ex.state.b = mix(before.state.b, smp.state.b);
      ex.coords.F = mix(before.coords.F, smp.coords.F);
      ex.coords.G = mix(before.coords.G, smp.coords.G);
      ex.coords.H = ex.coords.F * ex.coords.F + ex.coords.G * ex.coords.G;
      out.exit = ex;
      out.status = FullStatus::exited;
      break;
    }
    if (smp.state.lambda <= cfg.lambda_stop_ratio * lambda0) break;
    if (smp.state.s >= cfg.s_max) break;
  }
  out.steps = solver.steps_taken();
  return out;
}

modulation::ResidualReport residuals(const FullRun& r) {
  std::vector<modulation::TrajectoryPoint> pts;
  pts.reserve(r.samples.size());
  for (const auto& smp : r.samples) {
    require(std::isfinite(smp.norms.N2_loc), ErrorCode::insufficient_samples,
            "full model residuals: a sample lacks weighted norms");
    pts.push_back({smp.state, smp.norms.N2_loc, smp.local});
  }
  return modulation::modulation_residuals(pts, r.params.c0, r.params.theta, r.params.intQ);
}

}  // namespace gkdv::full
