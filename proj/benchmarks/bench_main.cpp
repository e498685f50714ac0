#include <benchmark/benchmark.h>

#include <cmath>

#include "gkdv/pde.hpp"
#include "gkdv/profiles.hpp"
#include "gkdv/reduced.hpp"

namespace {

void BM_ProfileSet(benchmark::State& state) {
  const gkdv::GridSpec grid{-25.0, 25.0, static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(gkdv::profiles::build_profile_set(grid));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ProfileSet)->Arg(1251)->Arg(2501)->Arg(5001)->Unit(benchmark::kMillisecond)->Complexity();

void BM_Etdrk4Step(benchmark::State& state) {
  const gkdv::pde::DomainSpec domain{-64.0, 64.0, static_cast<std::size_t>(state.range(0))};
  gkdv::pde::GkdvSolver solver(domain);
  auto u = gkdv::pde::Field::sample(0.0, domain, gkdv::profiles::q_value);
  const double dt = solver.stable_dt(u);
  solver.step(u, dt);  // coefficient cache
  for (auto _ : state) u = solver.step(u, dt);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Etdrk4Step)->Arg(1024)->Arg(4096)->Arg(16384)->Arg(36864)->Unit(benchmark::kMicrosecond);

void BM_ReducedIntegration(benchmark::State& state) {
  const auto p = gkdv::reduced::params_from_beta(0.4, 3.4508218076, 100.0);
  gkdv::reduced::IntegrateOptions opt;
  opt.samples = 401;
  const double tol = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gkdv::reduced::integrate(gkdv::reduced::exact_solution(p, 100.0), p, 1e4, tol, opt));
  }
}
BENCHMARK(BM_ReducedIntegration)->Arg(8)->Arg(10)->Arg(13)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
