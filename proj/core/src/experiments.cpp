#include "gkdv/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "gkdv/errors.hpp"
#include "gkdv/full_model.hpp"
#include "gkdv/modulation.hpp"
#include "gkdv/parallel.hpp"
#include "gkdv/pde.hpp"
#include "gkdv/profiles.hpp"
#include "gkdv/reduced.hpp"
#include "gkdv/shooting.hpp"
#include "json.hpp"

#ifndef GKDV_VERSION
#define GKDV_VERSION "unversioned"
#endif

namespace gkdv::experiments {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using config::ExperimentConfig;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// JSON has no inf/nan; such values are written as strings.
ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return io::format_double(v);
}

double from_num(const ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return io::parse_double(j.get<std::string>());
  return nan;
}

Criterion below(std::string name, double measured, double threshold, std::string detail = {}) {
  return {std::move(name), measured < threshold, measured, threshold, "<", std::move(detail)};
}

Criterion at_most(std::string name, double measured, double threshold, std::string detail = {}) {
  return {std::move(name), measured <= threshold, measured, threshold, "<=", std::move(detail)};
}

Criterion at_least(std::string name, double measured, double threshold, std::string detail = {}) {
  return {std::move(name), measured >= threshold, measured, threshold, ">=", std::move(detail)};
}

// Least-squares slope of log|y| against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

const char* plot_script = R"(#!/usr/bin/env python3
"""Plot every CSV table in this directory: each column against the first one."""
import csv
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).parent)
for path in sorted(here.glob("*.csv")):
    with path.open() as f:
        rows = list(csv.reader(f))
    if len(rows) < 2:
        continue
    header, body = rows[0], rows[1:]

    def column(i):
        out = []
        for r in body:
            try:
                out.append(float(r[i]))
            except ValueError:
                out.append(float("nan"))
        return out

    x = column(0)
    fig, ax = plt.subplots(figsize=(7, 4))
    for i in range(1, len(header)):
        y = column(i)
        if any(v == v for v in y):
            ax.plot(x, y, label=header[i])
    ax.set_xlabel(header[0])
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path.with_suffix(".png"))
    plt.close(fig)
)";

struct Context {
  const ExperimentConfig& cfg;
  fs::path dir;
  RunManifest& out;

  void measure(std::string name, double v) { out.measurements.push_back({std::move(name), v}); }
  void criterion(Criterion c) { out.criteria.push_back(std::move(c)); }
};

void row_exit(io::CsvTable& t, const shooting::ExitRecord& r) {
  t.add_row(std::vector<std::string>{io::format_double(r.lambda0), io::format_double(r.b0),
                                     std::string(shooting::to_string(r.status)), io::format_double(r.s_star),
                                     io::format_double(r.exit_F), io::format_double(r.exit_G),
                                     io::format_double(r.exit_angle), io::format_double(r.H_prime)});
}

io::CsvTable exit_table() { return io::CsvTable({"lambda0", "b0", "status", "s_star", "F", "G", "angle", "H_prime"}); }

// ---------------------------------------------------------------- profiles

void run_profiles(Context& c) {
  const auto& pc = c.cfg.profiles;
  const GridSpec grid{pc.y_min, pc.y_max, pc.n};
  const auto ps = profiles::build_profile_set(grid);
  const auto id = profiles::identities(ps);

  const auto qb = profiles::build_Qb(pc.qb_b, grid, ps);
  io::CsvTable prof({"y", "Q", "Y0", "P", "Qb"});
  for (std::size_t i = 0; i < grid.n; ++i) prof.add_row({grid.node(i), ps.Q[i], ps.Y0[i], ps.P[i], qb[i]});
  io::write_csv(c.dir / "profiles.csv", prof);

  ordered_json j;
  j["intQ"] = id.intQ;
  j["intQ2"] = id.intQ2;
  j["innerQY0"] = id.inner_Q_Y0;
  j["innerPQ"] = id.inner_P_Q;
  j["innerPQprime"] = id.inner_P_Qprime;
  j["residuals"] = {{"y0_identity_rel", id.y0_identity_rel},
                    {"p_identity_rel", id.p_identity_rel},
                    {"p_qprime_abs", id.p_qprime_abs},
                    {"ground_state", id.ground_state_residual},
                    {"y0_equation", id.y0_equation_residual},
                    {"p_left_limit", id.p_left_limit_error}};
  io::write_text(c.dir / "identities.json", j.dump(2) + "\n");

  io::CsvTable exp({"b", "mass_error", "energy_error", "nodes"});
  std::vector<double> bs, errs;
  for (double b : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const auto e = profiles::qb_expansion(b, ps);
    exp.add_row({b, e.mass_error, e.energy_error, static_cast<double>(e.nodes)});
    bs.push_back(b);
    errs.push_back(e.mass_error);
  }
  io::write_csv(c.dir / "qb_expansion.csv", exp);
  const double slope = loglog_slope(bs, errs);

  c.measure("intQ", id.intQ);
  c.measure("ground_state_residual", id.ground_state_residual);
  c.criterion(below("(Q,Y0) identity, relative", id.y0_identity_rel, 1e-6));
  c.criterion(below("(P,Q) identity, relative", id.p_identity_rel, 1e-6));
  c.criterion(below("|(P,Q')|", id.p_qprime_abs, 1e-8));
  c.criterion({"Q_b mass expansion slope", slope >= 1.2 && slope <= 2.1, slope, 1.2, "in [1.2, 2.1]",
               "b in {1e-2, 1e-3, 1e-4, 1e-5}"});
}

// ---------------------------------------------------------------- reduced

double reference_intQ() { return profiles::build_profile_set().intQ; }

void run_reduced(Context& c) {
  const auto& g = c.cfg.general;
  const auto& rc = c.cfg.reduced;
  const auto p = reduced::params_from_beta(g.beta, reference_intQ(), g.s0);
  reduced::IntegrateOptions opt;
  opt.samples = rc.samples;
  const auto traj = reduced::integrate(reduced::exact_solution(p, g.s0), p, rc.s_end_factor * g.s0, rc.tol, opt);
  require(traj.status == reduced::TrajectoryStatus::completed, ErrorCode::integration_halted,
          fmt::format("reduced integration ended early ({}): {}", reduced::to_string(traj.status), traj.halt_reason));

  io::CsvTable t({"s", "t", "lambda", "x", "b", "g", "f", "F", "G", "H", "lambda_exact"});
  double lerr = 0.0, gdrift = 0.0;
  const double g0 = traj.samples.front().coords.g;
  for (const auto& smp : traj.samples) {
    const auto ex = reduced::exact_solution(p, smp.state.s);
    lerr = std::max(lerr, std::abs(smp.state.lambda / ex.lambda - 1.0));
    gdrift = std::max(gdrift, std::abs(smp.coords.g - g0));
    t.add_row({smp.state.s, smp.t, smp.state.lambda, smp.state.x, smp.state.b, smp.coords.g, smp.coords.f,
               smp.coords.F, smp.coords.G, smp.coords.H, ex.lambda});
  }
  io::write_csv(c.dir / "trajectory.csv", t);

  const auto skeleton = reduced::classify_regime(g.beta);
  const auto window = reduced::fit_window(traj);
  const auto fit = reduced::fit_exponent(window, skeleton);
  const double predicted = skeleton.predicted_exponent.value_or(nan);
  const double rel = std::abs(fit.fitted_exponent / predicted - 1.0);

  ordered_json j;
  j["beta"] = g.beta;
  j["regime"] = std::string(reduced::to_string(fit.regime));
  j["predicted_exponent"] = num(predicted);
  j["fitted_exponent"] = num(fit.fitted_exponent);
  j["T_or_rate"] = num(fit.T_or_rate);
  j["fit_rms"] = num(fit.fit_rms);
  j["samples_used"] = fit.samples_used;
  j["theta"] = p.theta;
  j["c0"] = p.c0;
  io::write_text(c.dir / "regime.json", j.dump(2) + "\n");

  c.measure("fitted_exponent", fit.fitted_exponent);
  c.measure("predicted_exponent", predicted);
  c.measure("accepted_steps", static_cast<double>(traj.accepted_steps));
  c.criterion(below("lambda relative error against s^-beta", lerr, 1e-6));
  c.criterion(below("g drift", gdrift, 1e-10));
  c.criterion(below("fitted exponent relative error", rel, 0.02, std::string(reduced::to_string(fit.regime))));
}

// ---------------------------------------------------------------- tail

void run_tail(Context& c) {
  const auto& tc = c.cfg.tail;
  const double intQ = reference_intQ();
  const pde::TailSpec tail{reduced::threshold_c0(tc.theta, intQ), tc.theta, tc.x0, tc.cutoff_start, tc.cutoff_width};
  tail.validate();
  const pde::DomainSpec domain{tc.x_min, tc.x_max, tc.n};
  domain.validate();
  pde::SolverOptions so;
  so.cfl = tc.cfl;
  pde::GkdvSolver solver(domain, so);
  const auto q0 = pde::build_tail(tail, domain);
  const double m0 = pde::conserved(q0).mass;

  io::CsvTable t({"t", "slope", "intercept", "fit_rms", "points", "x_lo", "x_hi", "max_difference", "min_ratio",
                  "max_ratio", "mass_drift"});
  double worst_slope = -std::numeric_limits<double>::infinity();
  double worst_mass = 0.0;
  pde::Field last = q0;
  solver.evolve(q0, tc.t_end, tc.t_end / static_cast<double>(tc.snapshots), [&](const pde::Snapshot& snap) {
    const double md = std::abs(snap.conserved.mass / m0 - 1.0);
    worst_mass = std::max(worst_mass, md);
    last = snap.field;
    if (snap.field.t() <= 0.0) return true;
    const auto rep = pde::verify_tail_decay(snap.field, tail);
    worst_slope = std::max(worst_slope, rep.slope);
    t.add_row({snap.field.t(), rep.slope, rep.intercept, rep.fit_rms, static_cast<double>(rep.points_used), rep.x_lo,
               rep.x_hi, rep.max_difference, rep.min_ratio, rep.max_ratio, md});
    return true;
  });
  io::write_csv(c.dir / "tail_decay.csv", t);

  io::CsvTable prof({"x", "q0", "f0"});
  for (std::size_t j = 0; j < domain.n; j += 8) {
    const double x = domain.node(j);
    if (x >= 0.0 && x <= tail.cutoff_start + tail.cutoff_width) prof.add_row({x, last[j], tail.value(x)});
  }
  io::write_csv(c.dir / "tail_profile.csv", prof);

  c.measure("c0", tail.c0);
  c.measure("steps", static_cast<double>(solver.steps_taken()));
  c.criterion(at_most("worst fitted decay exponent of |q0 - f0|", worst_slope, -(tc.theta + 1.5)));
  c.criterion(below("tail mass relative drift", worst_mass, 1e-8));
}

// ---------------------------------------------------------------- full

void run_full(Context& c) {
  const auto& g = c.cfg.general;
  const auto& fc = c.cfg.full;
  full::FullConfig cfg;
  cfg.beta = g.beta;
  cfg.s0 = g.s0;
  cfg.domain = {fc.x_min, fc.x_max, fc.n};
  cfg.cutoff_start = fc.cutoff_start;
  cfg.cutoff_width = fc.cutoff_width;
  cfg.B = fc.B;
  cfg.weight_h = fc.weight_h;
  cfg.snapshot_dt = fc.snapshot_dt;
  cfg.lambda_stop_ratio = fc.lambda_stop_ratio;
  cfg.t_max = fc.t_max;
  cfg.solver.cfl = fc.cfl;
  cfg.domain.validate();

  const auto ps = profiles::build_profile_set();
  const auto r = full::run(cfg, ps);

  io::CsvTable t({"t", "s", "lambda", "x", "b", "p", "N1", "N2", "N1_loc", "N2_loc", "F1", "F2", "local", "orth_yLQ",
                  "orth_LQ", "orth_Q", "iterations", "mass", "energy", "edge_amplitude", "F", "G", "H"});
  for (const auto& smp : r.samples) {
    const auto& st = smp.state;
    t.add_row({st.t, st.s, st.lambda, st.x, st.b, st.p, smp.norms.N1, smp.norms.N2, smp.norms.N1_loc,
               smp.norms.N2_loc, smp.norms.F1, smp.norms.F2, smp.local, smp.orthogonality[0], smp.orthogonality[1],
               smp.orthogonality[2], static_cast<double>(smp.iterations), smp.conserved.mass, smp.conserved.energy,
               smp.edge_amplitude, smp.coords.F, smp.coords.G, smp.coords.H});
  }
  io::write_csv(c.dir / "full_samples.csv", t);
  require(r.status != full::FullStatus::truncated, ErrorCode::integration_halted,
          fmt::format("full run truncated after {} samples: {}", r.samples.size(), r.reason));

  const auto rep = full::residuals(r);
  io::CsvTable rt({"t", "s", "lambda_res", "x_res", "b_s", "g", "g_s", "bound", "modulation_bound", "g_bound"});
  double g_s_integral = 0.0;
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    const auto& s = rep.samples[i];
    rt.add_row({s.t, s.s, s.lambda_res, s.x_res, s.b_s, s.g, s.g_s, s.bound, s.modulation_bound, s.g_bound});
    if (i > 0) {
      const auto& a = rep.samples[i - 1];
      g_s_integral += 0.5 * (a.g_s + s.g_s) * (s.s - a.s);
    }
  }
  io::write_csv(c.dir / "residuals.csv", rt);

  const double window = r.samples.back().state.lambda / r.samples.front().state.lambda;
  c.measure("samples", static_cast<double>(r.samples.size()));
  c.measure("s_end", r.samples.back().state.s);
  c.measure("mass_drift", r.mass_drift);
  c.measure("energy_drift", r.energy_drift);
  c.measure("tail_mass_drift", r.tail_mass_drift);
  c.measure("g_drift", rep.g_drift);
  c.measure("g_integrated_bound", rep.g_integrated_bound);
  c.measure("g_s_integral", g_s_integral);
  c.measure("max_modulation_ratio", rep.max_modulation_ratio);
  c.criterion(at_least("lambda window ratio lambda_end/lambda_0", window, 1.0 / 3.0));
  c.criterion(at_most("modulation residual constant", rep.max_ratio, 10.0, "max over samples of residual / (N2loc^1/2 + s^-2)"));
  c.criterion(at_most("g drift against integrated bound", rep.g_ratio, 10.0));
  c.criterion({"g drift sign matches integrated g_s", (rep.g_drift > 0) == (g_s_integral > 0) && rep.g_drift != 0.0,
               rep.g_drift * g_s_integral, 0.0, ">", "product of drift and integral of measured g_s"});
}

// ---------------------------------------------------------------- shoot

shooting::ShootRectangle jittered(const shooting::ShootRectangle& D, double jitter, std::uint64_t seed) {
  if (jitter == 0.0) return D;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, jitter);
  const double hl = 0.5 * (D.lambda_hi - D.lambda_lo), hb = 0.5 * (D.b_hi - D.b_lo);
  shooting::ShootRectangle r = D;
  r.lambda_lo += u(rng) * hl;
  r.lambda_hi -= u(rng) * hl;
  r.b_lo += u(rng) * hb;
  r.b_hi -= u(rng) * hb;
  return r;
}

void run_shoot(Context& c, std::size_t workers) {
  const auto& g = c.cfg.general;
  const auto& sc = c.cfg.shoot;
  const auto ps = profiles::build_profile_set();
  shooting::ShootContext ctx;
  ctx.params = reduced::params_from_beta(g.beta, ps.intQ, g.s0);
  ctx.model = sc.model == "reduced" ? shooting::Model::reduced : shooting::Model::full_pde;
  if (sc.s_max_factor > 0.0) ctx.s_max = sc.s_max_factor * g.s0;
  ctx.tol = sc.tol;
  ctx.profiles = &ps;
  ctx.workers = workers;
  if (ctx.model == shooting::Model::full_pde) {
    const auto& fc = c.cfg.full;
    ctx.full_config.domain = {fc.x_min, fc.x_max, fc.n};
    ctx.full_config.cutoff_start = fc.cutoff_start;
    ctx.full_config.cutoff_width = fc.cutoff_width;
    ctx.full_config.B = fc.B;
    ctx.full_config.weight_h = fc.weight_h;
    ctx.full_config.snapshot_dt = fc.snapshot_dt;
    ctx.full_config.lambda_stop_ratio = fc.lambda_stop_ratio;
    ctx.full_config.t_max = fc.t_max;
    ctx.full_config.solver.cfl = fc.cfl;
  }

  const auto D = shooting::ShootRectangle::full_domain(ctx.params);
  double min_hprime = std::numeric_limits<double>::infinity();
  std::size_t finite_exits = 0;
  auto note = [&](const shooting::ExitRecord& r) {
    if (r.status == shooting::ExitStatus::exited) {
      ++finite_exits;
      min_hprime = std::min(min_hprime, std::isfinite(r.H_prime) ? r.H_prime : -1.0);
    }
  };

  const auto map = shooting::exit_map(D, ctx, sc.map_n);
  auto mt = exit_table();
  for (const auto& r : map) {
    row_exit(mt, r);
    note(r);
  }
  io::write_csv(c.dir / "exit_map.csv", mt);

  const auto wind = shooting::boundary_winding(D, ctx, sc.per_side);
  auto wt = exit_table();
  for (const auto& r : wind.boundary) {
    row_exit(wt, r);
    note(r);
  }
  io::write_csv(c.dir / "winding.csv", wt);

  const auto rect = jittered(D, sc.jitter, g.seed);
  const auto ref = shooting::refine(rect, ctx, sc.budget);
  std::string lines;
  for (std::size_t i = 0; i < ref.history.size(); ++i) {
    const auto& r = ref.history[i];
    note(r);
    ordered_json j;
    j["probe"] = i;
    j["lambda0"] = r.lambda0;
    j["b0"] = r.b0;
    j["status"] = std::string(shooting::to_string(r.status));
    j["s_star"] = num(r.s_star);
    j["F"] = num(r.exit_F);
    j["G"] = num(r.exit_G);
    j["H_prime"] = num(r.H_prime);
    j["best_s_star"] = num(ref.best_so_far[i]);
    lines += j.dump() + "\n";
  }
  io::write_text(c.dir / "refine.jsonl", lines);

  ordered_json s;
  s["D"] = {D.lambda_lo, D.lambda_hi, D.b_lo, D.b_hi};
  s["refine_rectangle"] = {rect.lambda_lo, rect.lambda_hi, rect.b_lo, rect.b_hi};
  s["final_bracket"] = {ref.final_bracket.lambda_lo, ref.final_bracket.lambda_hi, ref.final_bracket.b_lo,
                        ref.final_bracket.b_hi};
  s["best"] = {{"lambda0", ref.best.lambda0}, {"b0", ref.best.b0}, {"s_star", num(ref.best.s_star)}};
  s["winding"] = wind.winding;
  s["max_angle_jump"] = wind.max_jump;
  s["s_max"] = num(ctx.effective_s_max());
  io::write_text(c.dir / "shoot_summary.json", s.dump(2) + "\n");

  c.measure("finite_exits", static_cast<double>(finite_exits));
  c.measure("max_angle_jump", wind.max_jump);
  c.criterion({"every finite exit has H' > 0", finite_exits > 0 && min_hprime > 0.0, min_hprime, 0.0, ">",
               fmt::format("{} finite exits", finite_exits)});
  c.criterion({"boundary winding number equals 1", std::abs(wind.winding - 1.0) < 1e-6, wind.winding, 1.0, "==",
               fmt::format("{} boundary runs", wind.boundary.size())});
  c.criterion(at_least(fmt::format("best s* after {} probes", sc.budget), ref.best.s_star, 10.0 * g.s0));
}

// ---------------------------------------------------------------- report

std::string statement_for(const std::string& experiment, double beta) {
  if (experiment != "reduced") return "supporting";
  if (std::abs(beta - 1.0 / 3.0) <= 1e-12) return "(ii) exponential grow-up";
  return beta > 1.0 / 3.0 ? "(i) finite-time blow-up" : "(ii) power grow-up";
}

void run_report(Context& c) {
  std::vector<fs::path> inputs;
  if (!c.cfg.report.inputs.empty()) {
    std::string_view rest = c.cfg.report.inputs;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      std::string item(rest.substr(0, comma));
      item.erase(0, item.find_first_not_of(' '));
      item.erase(item.find_last_not_of(' ') + 1);
      if (!item.empty()) inputs.emplace_back(item);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
  } else {
    for (const auto& e : fs::recursive_directory_iterator(c.dir)) {
      if (e.is_regular_file() && e.path().filename() == manifest_name && e.path().parent_path() != c.dir) {
        inputs.push_back(e.path().parent_path());
      }
    }
    std::sort(inputs.begin(), inputs.end());
  }
  require(!inputs.empty(), ErrorCode::io, "report: no run manifests found");

  io::CsvTable t({"statement", "experiment", "beta", "directory", "status", "criteria_passed", "criteria_total",
                  "fitted_exponent", "predicted_exponent"});
  std::size_t failed = 0;
  for (const auto& dir : inputs) {
    const auto m = read_manifest(dir / manifest_name);
    const auto cfg = config::parse(m.config_text);
    const auto passed = std::count_if(m.criteria.begin(), m.criteria.end(), [](const Criterion& k) { return k.passed; });
    double fitted = nan, predicted = nan;
    for (const auto& ms : m.measurements) {
      if (ms.name == "fitted_exponent") fitted = ms.value;
      if (ms.name == "predicted_exponent") predicted = ms.value;
    }
    if (!m.passed()) ++failed;
    t.add_row(std::vector<std::string>{statement_for(m.experiment, cfg.general.beta), m.experiment,
                                       io::format_double(cfg.general.beta), dir.generic_string(),
                                       m.passed() ? "pass" : "fail", std::to_string(passed),
                                       std::to_string(m.criteria.size()), io::format_double(fitted),
                                       io::format_double(predicted)});
  }
  io::write_csv(c.dir / "summary.csv", t);
  c.measure("runs", static_cast<double>(inputs.size()));
  c.criterion(at_most("failed runs among aggregated manifests", static_cast<double>(failed), 0.0));
}

RunManifest run_impl(const ExperimentConfig& cfg, std::size_t workers) {
  cfg.validate();
  RunManifest m;
  m.experiment = std::string(config::to_string(cfg.general.experiment));
  m.config_text = config::serialize(cfg);
  m.version = std::string(version());
  m.directory = cfg.general.output;
  fs::create_directories(m.directory);
  const auto start = std::chrono::steady_clock::now();
  Context ctx{cfg, m.directory, m};
  try {
    switch (cfg.general.experiment) {
      case config::Experiment::profiles: run_profiles(ctx); break;
      case config::Experiment::reduced: run_reduced(ctx); break;
      case config::Experiment::tail: run_tail(ctx); break;
      case config::Experiment::full: run_full(ctx); break;
      case config::Experiment::shoot: run_shoot(ctx, workers); break;
      case config::Experiment::report: run_report(ctx); break;
    }
  } catch (const Error& e) {
    m.error = fmt::format("{}: {}", to_string(e.code()), e.what());
  }
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_text(m.directory / "config.ini", m.config_text);
  io::write_text(m.directory / "plot.py", plot_script);
  m.files = io::list_files(m.directory, {std::string(manifest_name)});
  io::write_text(m.directory / manifest_name, manifest_json(m));
  return m;
}

}  // namespace

bool RunManifest::passed() const {
  return error.empty() && !criteria.empty() &&
         std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.passed; });
}

std::string_view version() { return GKDV_VERSION; }

RunManifest run(const ExperimentConfig& cfg, std::size_t workers) { return run_impl(cfg, workers); }

std::vector<RunManifest> sweep(const ExperimentConfig& cfg, std::string_view parameter,
                               const std::vector<std::string>& values, std::size_t workers) {
  const std::string key = config::sweep_key(cfg, parameter);
  if (values.empty()) return {};
  // Resolve every member config first so that a bad value is a usage error.
  std::vector<ExperimentConfig> members;
  for (const auto& v : values) {
    ExperimentConfig m = cfg;
    config::set_value(m, key, v);
    m.general.output = (fs::path(cfg.general.output) / fmt::format("{}-{}", parameter, v)).generic_string();
    m.validate();
    members.push_back(std::move(m));
  }
  // Members run in parallel; each one is single-threaded inside.
  const auto out =
      parallel_map<RunManifest>(members.size(), workers, [&](std::size_t i) { return run_impl(members[i], 1); });

  std::vector<std::string> names;
  std::set<std::string> seen;
  for (const auto& m : out) {
    for (const auto& c : m.criteria) {
      if (seen.insert(c.name).second) names.push_back(c.name);
    }
  }
  std::vector<std::string> header{"parameter", "value", "status", "directory"};
  header.insert(header.end(), names.begin(), names.end());
  io::CsvTable t(header);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::vector<std::string> row{std::string(parameter), values[i], out[i].passed() ? "pass" : "fail",
                                 fs::path(out[i].directory).filename().generic_string()};
    for (const auto& n : names) {
      const auto it = std::find_if(out[i].criteria.begin(), out[i].criteria.end(),
                                   [&n](const Criterion& c) { return c.name == n; });
      row.push_back(it == out[i].criteria.end() ? "" : io::format_double(it->measured));
    }
    t.add_row(row);
  }
  const fs::path base = cfg.general.output;
  io::write_csv(base / "sweep.csv", t);

  ordered_json j;
  j["parameter"] = std::string(parameter);
  j["key"] = key;
  j["version"] = std::string(version());
  j["sweep_csv_sha256"] = io::sha256_file(base / "sweep.csv");
  j["runs"] = ordered_json::array();
  for (std::size_t i = 0; i < out.size(); ++i) {
    j["runs"].push_back({{"value", values[i]},
                         {"directory", fs::path(out[i].directory).filename().generic_string()},
                         {"status", out[i].passed() ? "pass" : "fail"},
                         {"manifest_sha256", io::sha256_file(fs::path(out[i].directory) / manifest_name)}});
  }
  io::write_text(base / "sweep_manifest.json", j.dump(2) + "\n");
  return out;
}

std::string manifest_json(const RunManifest& m) {
  ordered_json j;
  j["experiment"] = m.experiment;
  j["version"] = m.version;
  j["status"] = m.passed() ? "pass" : "fail";
  j["error"] = m.error;
  j["wall_seconds"] = m.wall_seconds;
  j["config"] = m.config_text;
  j["criteria"] = ordered_json::array();
  for (const auto& c : m.criteria) {
    j["criteria"].push_back({{"name", c.name},
                             {"passed", c.passed},
                             {"measured", num(c.measured)},
                             {"threshold", num(c.threshold)},
                             {"relation", c.relation},
                             {"detail", c.detail}});
  }
  j["measurements"] = ordered_json::object();
  for (const auto& ms : m.measurements) j["measurements"][ms.name] = num(ms.value);
  j["files"] = ordered_json::array();
  for (const auto& f : m.files) j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return j.dump(2) + "\n";
}

RunManifest read_manifest(const fs::path& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(io::read_text(path));
  } catch (const ordered_json::exception& e) {
    fail(ErrorCode::io, fmt::format("{}: {}", path.string(), e.what()));
  }
  RunManifest m;
  try {
    m.experiment = j.at("experiment").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.error = j.at("error").get<std::string>();
    m.wall_seconds = j.at("wall_seconds").get<double>();
    m.config_text = j.at("config").get<std::string>();
    m.directory = path.parent_path();
    for (const auto& c : j.at("criteria")) {
      m.criteria.push_back({c.at("name").get<std::string>(), c.at("passed").get<bool>(), from_num(c.at("measured")),
                            from_num(c.at("threshold")), c.at("relation").get<std::string>(),
                            c.at("detail").get<std::string>()});
    }
    for (const auto& [k, v] : j.at("measurements").items()) m.measurements.push_back({k, from_num(v)});
    for (const auto& f : j.at("files")) {
      m.files.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>(),
                         f.at("bytes").get<std::uintmax_t>()});
    }
  } catch (const ordered_json::exception& e) {
    fail(ErrorCode::io, fmt::format("{}: malformed manifest: {}", path.string(), e.what()));
  }
  return m;
}

int exit_code(const RunManifest& m) { return m.passed() ? 0 : 1; }

int exit_code(const std::vector<RunManifest>& ms) {
  return std::all_of(ms.begin(), ms.end(), [](const RunManifest& m) { return m.passed(); }) ? 0 : 1;
}

}  // namespace gkdv::experiments
