#include <benchmark/benchmark.h>

#include <random>

#include "planecell/grid.hpp"

using namespace planecell;

namespace {

Field random_field(const TorusSpec& spec, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field f(spec);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = dist(rng);
  return f;
}

}  // namespace

static void BM_forward_2d(benchmark::State& state) {
  const TorusSpec spec{2, 16, int(state.range(0))};
  const Field f = random_field(spec, 1u);
  for (auto _ : state) benchmark::DoNotOptimize(forward(f));
  state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(f.size()));
}
BENCHMARK(BM_forward_2d)->Arg(64)->Arg(128)->Arg(256);

static void BM_round_trip_2d(benchmark::State& state) {
  const TorusSpec spec{2, 16, int(state.range(0))};
  const Field f = random_field(spec, 2u);
  for (auto _ : state) benchmark::DoNotOptimize(inverse(forward(f)));
}
BENCHMARK(BM_round_trip_2d)->Arg(128)->Arg(256);

static void BM_apply_resolvent(benchmark::State& state) {
  const TorusSpec spec{2, 16, int(state.range(0))};
  const Field f = random_field(spec, 3u);
  const OperatorSpec op{OperatorKind::resolvent_power, 1.0, -0.9, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(apply_operator(op, f));
}
BENCHMARK(BM_apply_resolvent)->Arg(128)->Arg(256);

static void BM_poisson_zero_mean(benchmark::State& state) {
  const TorusSpec spec{2, 16, int(state.range(0))};
  Field g = random_field(spec, 4u);
  g += -g.mean();
  for (auto _ : state) benchmark::DoNotOptimize(solve_poisson_zero_mean(g));
}
BENCHMARK(BM_poisson_zero_mean)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
