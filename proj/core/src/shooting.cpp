#include "gkdv/shooting.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>

#include "gkdv/errors.hpp"
#include "gkdv/ode.hpp"
#include "gkdv/parallel.hpp"

namespace gkdv::shooting {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap(double a) {
  while (a > std::numbers::pi) a -= two_pi;
  while (a <= -std::numbers::pi) a += two_pi;
  return a;
}

// dH/ds at a reduced state by central differences along the flow.
double reduced_H_prime(const reduced::ReducedState& st, const reduced::RegimeParams& p) {
  const auto f = [&p](double s, const ode::Vec<3>& y) {
    const auto d = reduced::rhs({s, y[0], y[1], y[2]}, p);
    return ode::Vec<3>{d.lambda_s, d.x_s, d.b_s};
  };
  const ode::DormandPrince<3, decltype(f)> dp{f};
  const double h = 1e-4 * st.s;
  const ode::Vec<3> y{st.lambda, st.x, st.b};
  const auto fwd = dp.step(st.s, y, h).y;
  const auto bwd = dp.step(st.s, y, -h).y;
  const double Hp = reduced::instability_coords({st.s + h, fwd[0], fwd[1], fwd[2]}, p).H;
  const double Hm = reduced::instability_coords({st.s - h, bwd[0], bwd[1], bwd[2]}, p).H;
  return (Hp - Hm) / (2.0 * h);
}

ExitRecord simulate_reduced(double lambda0, double b0, const ShootContext& ctx) {
  const auto& p = ctx.params;
  ExitRecord rec;
  rec.lambda0 = lambda0;
  rec.b0 = b0;
  const reduced::ReducedState init{p.s0, lambda0, reduced::threshold_x(p.beta, p.s0), b0};
  reduced::IntegrateOptions opt;
  opt.samples = 2;
  opt.stop_at_exit = true;
  const auto traj = reduced::integrate(init, p, ctx.effective_s_max(), ctx.tol, opt);
  switch (traj.status) {
    case reduced::TrajectoryStatus::exited: {
      const auto& ex = *traj.exit;
      rec.status = ExitStatus::exited;
      rec.s_star = ex.state.s;
      rec.exit_F = ex.coords.F;
      rec.exit_G = ex.coords.G;
      rec.exit_angle = std::atan2(ex.coords.G, ex.coords.F);
      rec.H_prime = reduced_H_prime(ex.state, p);
      break;
    }
    case reduced::TrajectoryStatus::completed: {
      const auto& last = traj.samples.back();
      rec.status = ExitStatus::reached_s_max;
      rec.exit_F = last.coords.F;
      rec.exit_G = last.coords.G;
      rec.exit_angle = std::atan2(last.coords.G, last.coords.F);
      break;
    }
    case reduced::TrajectoryStatus::halted: {
      rec.status = ExitStatus::truncated;
      rec.reason = traj.halt_reason;
      rec.s_star = traj.samples.back().state.s;
      rec.exit_angle = std::numeric_limits<double>::quiet_NaN();
      break;
    }
  }
  return rec;
}

ExitRecord simulate_full(double lambda0, double b0, const ShootContext& ctx) {
  require(ctx.profiles != nullptr, ErrorCode::invalid_argument, "full-PDE shooting needs a profile set");
  full::FullConfig cfg = ctx.full_config;
  cfg.beta = ctx.params.beta;
  cfg.s0 = ctx.params.s0;
  cfg.lambda0 = lambda0;
  cfg.b0 = b0;
  cfg.s_max = ctx.effective_s_max();
  cfg.stop_at_exit = true;
  const auto run = full::run(cfg, *ctx.profiles);
  ExitRecord rec;
  rec.lambda0 = lambda0;
  rec.b0 = b0;
  if (run.status == full::FullStatus::exited && run.exit) {
    rec.status = ExitStatus::exited;
    rec.s_star = run.exit->state.s;
    rec.exit_F = run.exit->coords.F;
    rec.exit_G = run.exit->coords.G;
    rec.exit_angle = std::atan2(rec.exit_G, rec.exit_F);
    const auto n = run.samples.size();
    if (n >= 2) {
      const auto& a = run.samples[n - 2];
      const auto& b = run.samples[n - 1];
      rec.H_prime = (b.coords.H - a.coords.H) / (b.state.s - a.state.s);
    }
  } else if (run.status == full::FullStatus::truncated) {
    rec.status = ExitStatus::truncated;
    rec.reason = run.reason;
    rec.s_star = run.samples.empty() ? ctx.params.s0 : run.samples.back().state.s;
    rec.exit_angle = std::numeric_limits<double>::quiet_NaN();
  } else {
    rec.status = ExitStatus::reached_s_max;
    const auto& last = run.samples.back();
    rec.exit_F = last.coords.F;
    rec.exit_G = last.coords.G;
    rec.exit_angle = std::atan2(rec.exit_G, rec.exit_F);
    if (last.state.s < cfg.s_max) {
      // Window ended (lambda stop or t_max) before s_max: report as truncated.
      rec.status = ExitStatus::truncated;
      rec.reason = "window ended before s_max";
      rec.s_star = last.state.s;
    }
  }
  return rec;
}

bool deeper(const ExitRecord& a, const ExitRecord& b) { return a.s_star > b.s_star; }

}  // namespace

ShootRectangle ShootRectangle::full_domain(const reduced::RegimeParams& p) {
  const double l = std::pow(p.s0, -p.beta);
  const double dl = std::pow(p.s0, -p.beta - 0.1);
  const double b = p.beta / p.s0;
  const double db = std::pow(p.s0, -1.1);
  return {l - dl, l + dl, b - db, b + db};
}

bool ShootRectangle::contains(double lambda, double b) const {
  return lambda >= lambda_lo && lambda <= lambda_hi && b >= b_lo && b <= b_hi;
}

void ShootRectangle::validate(const reduced::RegimeParams& p) const {
  require(lambda_lo < lambda_hi && b_lo < b_hi, ErrorCode::geometry, "ShootRectangle: empty rectangle");
  const auto D = full_domain(p);
  const double sl = 1e-12 * (D.lambda_hi - D.lambda_lo);
  const double sb = 1e-12 * (D.b_hi - D.b_lo);
  require(lambda_lo >= D.lambda_lo - sl && lambda_hi <= D.lambda_hi + sl && b_lo >= D.b_lo - sb &&
              b_hi <= D.b_hi + sb,
          ErrorCode::geometry,
          fmt::format("ShootRectangle [{}, {}] x [{}, {}] leaves D = [{}, {}] x [{}, {}]", lambda_lo, lambda_hi, b_lo,
                      b_hi, D.lambda_lo, D.lambda_hi, D.b_lo, D.b_hi));
  require(lambda_lo > 0.0, ErrorCode::geometry, "ShootRectangle: lambda must stay positive");
}

std::string_view to_string(Model model) { return model == Model::reduced ? "reduced" : "full-pde"; }

std::string_view to_string(ExitStatus status) {
  switch (status) {
    case ExitStatus::exited: return "exited";
    case ExitStatus::reached_s_max: return "reached-s-max";
    case ExitStatus::truncated: return "truncated";
  }
  return "unknown";
}

double ShootContext::effective_s_max() const {
  if (s_max) return *s_max;
  return (model == Model::reduced ? 100.0 : 5.0) * params.s0;
}

std::pair<double, double> chart(double F0, double G0, const reduced::RegimeParams& p) {
  const double x0 = reduced::threshold_x(p.beta, p.s0);
  const double root = F0 * std::pow(p.s0, -0.5 * p.beta - 0.1) -
                      2.0 * p.c0 / (p.intQ * (p.theta - 1.0)) * std::pow(x0, 1.0 - p.theta);
  require(root > 0.0, ErrorCode::geometry, "chart: F0 too negative for a positive lambda0");
  const double lambda0 = root * root;
  const double g = G0 * std::pow(p.s0, -(1.0 - 2.0 * p.beta + 0.2));
  const double b0 = lambda0 * lambda0 * (g - p.forcing() * std::pow(lambda0, -1.5) * std::pow(x0, -p.theta));
  return {lambda0, b0};
}

ExitRecord simulate_until_exit(double lambda0, double b0, const ShootContext& ctx) {
  const auto D = ShootRectangle::full_domain(ctx.params);
  const double sl = 1e-12 * (D.lambda_hi - D.lambda_lo), sb = 1e-12 * (D.b_hi - D.b_lo);
  require(ShootRectangle{D.lambda_lo - sl, D.lambda_hi + sl, D.b_lo - sb, D.b_hi + sb}.contains(lambda0, b0),
          ErrorCode::geometry, fmt::format("simulate_until_exit: ({}, {}) outside D", lambda0, b0));
  require(ctx.effective_s_max() > ctx.params.s0, ErrorCode::invalid_argument, "simulate_until_exit: s_max <= s0");
  return ctx.model == Model::reduced ? simulate_reduced(lambda0, b0, ctx) : simulate_full(lambda0, b0, ctx);
}

RefineResult refine(const ShootRectangle& rect, const ShootContext& ctx, std::size_t budget) {
  require(budget >= 9, ErrorCode::invalid_argument, "refine: budget must be at least 9");
  rect.validate(ctx.params);
  RefineResult res;
  const std::array<double, 3> ls{rect.lambda_lo, rect.lambda_mid(), rect.lambda_hi};
  const std::array<double, 3> bs{rect.b_lo, rect.b_mid(), rect.b_hi};
  const auto probe = parallel_map<ExitRecord>(9, ctx.workers, [&](std::size_t k) {
    return simulate_until_exit(ls[k % 3], bs[k / 3], ctx);
  });
  auto note = [&res](const ExitRecord& r) {
    res.history.push_back(r);
    if (res.history.size() == 1 || deeper(r, res.best)) res.best = r;
    res.best_so_far.push_back(res.best.s_star);
  };
  for (const auto& r : probe) note(r);
  if (budget == 9) {
    res.final_bracket = rect;
    return res;
  }

  // Sign changes on the middle row (F across lambda) and column (G across b).
  const auto& g_lo = probe[1 + 3 * 0];
  const auto& g_hi = probe[1 + 3 * 2];
  const auto& f_lo = probe[0 + 3 * 1];
  const auto& f_hi = probe[2 + 3 * 1];
  const bool g_change = g_lo.exit_G < 0.0 && g_hi.exit_G > 0.0;
  const bool f_change = f_lo.exit_F < 0.0 && f_hi.exit_F > 0.0;
  if (!g_change || !f_change) {
    std::string map;
    for (const auto& r : probe) {
      map += fmt::format("\n  lambda0={:.6e} b0={:.6e} s*={:.4e} F={:+.3e} G={:+.3e} {}", r.lambda0, r.b0, r.s_star,
                         r.exit_F, r.exit_G, to_string(r.status));
    }
    fail(ErrorCode::search_failed, "refine: no sign change bracketing the threshold on the 3x3 probe" + map);
  }

  ShootRectangle br = rect;
  while (res.history.size() < budget) {
    const auto r = simulate_until_exit(br.lambda_mid(), br.b_mid(), ctx);
    note(r);
    // Runs that reach s_max still carry the signs of (F, G) at the horizon.
    if (r.status == ExitStatus::truncated) break;
    const double l = br.lambda_mid(), b = br.b_mid();
    (r.exit_G > 0.0 ? br.b_hi : br.b_lo) = b;
    if (std::abs(r.exit_F) >= std::abs(r.exit_G)) (r.exit_F > 0.0 ? br.lambda_hi : br.lambda_lo) = l;
    // A bracket that collapsed with an unchanged sign lost its root when the
    // other coordinate moved; reopen it towards the rectangle edge.
    if (br.b_hi - br.b_lo < 1e-6 * (rect.b_hi - rect.b_lo)) {
      (r.exit_G > 0.0 ? br.b_lo : br.b_hi) = r.exit_G > 0.0 ? rect.b_lo : rect.b_hi;
    }
    if (br.lambda_hi - br.lambda_lo < 1e-6 * (rect.lambda_hi - rect.lambda_lo)) {
      (r.exit_F > 0.0 ? br.lambda_lo : br.lambda_hi) = r.exit_F > 0.0 ? rect.lambda_lo : rect.lambda_hi;
    }
  }
  res.final_bracket = br;
  return res;
}

std::vector<ExitRecord> exit_map(const ShootRectangle& rect, const ShootContext& ctx, std::size_t grid_n) {
  require(grid_n >= 2, ErrorCode::invalid_argument, "exit_map: grid_n must be at least 2");
  rect.validate(ctx.params);
  const auto n = static_cast<double>(grid_n - 1);
  return parallel_map<ExitRecord>(grid_n * grid_n, ctx.workers, [&](std::size_t k) {
    const double l = rect.lambda_lo + (rect.lambda_hi - rect.lambda_lo) * static_cast<double>(k % grid_n) / n;
    const double b = rect.b_lo + (rect.b_hi - rect.b_lo) * static_cast<double>(k / grid_n) / n;
    try {
      return simulate_until_exit(l, b, ctx);
    } catch (const Error& e) {
      ExitRecord r;
      r.lambda0 = l;
      r.b0 = b;
      r.status = ExitStatus::truncated;
      r.reason = e.what();
      r.exit_angle = std::numeric_limits<double>::quiet_NaN();
      return r;
    }
  });
}

WindingReport boundary_winding(const ShootRectangle& rect, const ShootContext& ctx, std::size_t per_side) {
  require(per_side >= 2, ErrorCode::invalid_argument, "boundary_winding: need at least 2 samples per side");
  rect.validate(ctx.params);
  // Counterclockwise with lambda horizontal and b vertical.
  const std::array<std::pair<double, double>, 5> corners{{{rect.lambda_lo, rect.b_lo},
                                                          {rect.lambda_hi, rect.b_lo},
                                                          {rect.lambda_hi, rect.b_hi},
                                                          {rect.lambda_lo, rect.b_hi},
                                                          {rect.lambda_lo, rect.b_lo}}};
  std::vector<std::pair<double, double>> pts;
  for (std::size_t side = 0; side < 4; ++side) {
    const auto [l0, b0] = corners[side];
    const auto [l1, b1] = corners[side + 1];
    for (std::size_t k = 0; k < per_side; ++k) {
      const double a = static_cast<double>(k) / static_cast<double>(per_side);
      pts.emplace_back(l0 + a * (l1 - l0), b0 + a * (b1 - b0));
    }
  }
  WindingReport rep;
  rep.boundary = parallel_map<ExitRecord>(pts.size(), ctx.workers,
                                          [&](std::size_t k) { return simulate_until_exit(pts[k].first, pts[k].second, ctx); });
  double total = 0.0;
  for (std::size_t k = 0; k < rep.boundary.size(); ++k) {
    const double a0 = rep.boundary[k].exit_angle;
    const double a1 = rep.boundary[(k + 1) % rep.boundary.size()].exit_angle;
    require(std::isfinite(a0) && std::isfinite(a1), ErrorCode::search_failed,
            "boundary_winding: a boundary run was truncated");
    const double d = wrap(a1 - a0);
    rep.max_jump = std::max(rep.max_jump, std::abs(d));
    total += d;
  }
  rep.winding = total / two_pi;
  return rep;
}

}  // namespace gkdv::shooting
