#include <benchmark/benchmark.h>

#include "planecell/heteroclinic.hpp"
#include "planecell/lindstedt.hpp"

using namespace planecell;

static void BM_build_series(benchmark::State& state) {
  const TorusSpec spec{2, 1, 64};
  const auto pot = potential::PotentialSpec::product_cos({2, 3});
  const std::vector<double> omega{2.0, 3.0};
  const int order = int(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(lindstedt::build_series(pot, omega, spec, 0.25, order));
}
BENCHMARK(BM_build_series)->Arg(2)->Arg(4)->Arg(6);

static void BM_resonance_scan(benchmark::State& state) {
  const TorusSpec spec{2, 1, 32};
  const auto pot = potential::PotentialSpec::product_cos({2, 3});
  for (auto _ : state)
    benchmark::DoNotOptimize(lindstedt::analyze_resonance(
        pot, std::array<double, 2>{2.0, 3.0}, spec, 1, int(state.range(0))));
}
BENCHMARK(BM_resonance_scan)->Arg(64)->Arg(256);

static void BM_dae_quadrature(benchmark::State& state) {
  const TorusSpec spec{2, 1, 64};
  const auto pot = potential::PotentialSpec::product_cos({2, 3});
  const auto series =
      lindstedt::build_series(pot, std::vector<double>{2.0, 3.0}, spec, 0.25, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(heteroclinic::dae_quadrature(0.01, 0, pot, series));
}
BENCHMARK(BM_dae_quadrature);

BENCHMARK_MAIN();
