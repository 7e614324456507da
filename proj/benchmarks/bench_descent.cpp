#include <benchmark/benchmark.h>

#include "planecell/descent.hpp"
#include "planecell/energy.hpp"

// Sample run (2 x 3.0 GHz):
//   BM_descent_step/128                      3.5 ms
//   BM_descent_step/256                     14.8 ms
//   BM_solve_benchmark_point/iterations:1    154 ms
//   BM_average_energy/256                   12.8 ms
// The one-shot step rebuilds its per-mode tables each call; inside solve()
// they are computed once, so a converged benchmark solve costs far less than
// iterations * step time.

using namespace planecell;

static void BM_descent_step(benchmark::State& state) {
  const TorusSpec spec{2, 16, int(state.range(0))};
  const auto pot = potential::PotentialSpec::product_cos({2, 3});
  const auto omega = std::array<double, 2>{2.0, 3.0};
  Field z = Field::constant(spec, 0.25);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        descent::descent_step(z, omega, 0.01, pot, descent::DescentParams{}));
}
BENCHMARK(BM_descent_step)->Arg(128)->Arg(256);

static void BM_solve_benchmark_point(benchmark::State& state) {
  // One converged minimization of the reference configuration.
  const TorusSpec spec{2, 16, 256};
  const auto pot = potential::PotentialSpec::product_cos({2, 3});
  const auto omega = std::array<double, 2>{2.0, 3.0};
  for (auto _ : state) {
    const auto sol =
        descent::solve(spec, omega, 0.01, pot, descent::DescentParams{}, 0.25);
    benchmark::DoNotOptimize(sol.energy);
  }
}
BENCHMARK(BM_solve_benchmark_point)->Unit(benchmark::kMillisecond)->Iterations(1);

static void BM_average_energy(benchmark::State& state) {
  const TorusSpec spec{2, 16, int(state.range(0))};
  const auto pot = potential::PotentialSpec::product_cos({2, 3});
  const auto omega = std::array<double, 2>{2.0, 3.0};
  const Field z = Field::constant(spec, 0.25);
  for (auto _ : state)
    benchmark::DoNotOptimize(energy::reduced_average_energy(z, omega, 0.01, pot));
}
BENCHMARK(BM_average_energy)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
