#include <benchmark/benchmark.h>

#include "latrev/classical.hpp"

using namespace latrev::classical;

namespace {

void BM_Advance(benchmark::State& state) {
  ClassicalParams p;
  p.kappa = 2.0;
  p.lambda = 0.5;
  p.order = static_cast<int>(state.range(0));
  const long steps = 100L * p.steps_per_period;
  for (auto _ : state) benchmark::DoNotOptimize(advance({1.2, 0.3}, 0.0, steps, p));
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_Advance)->Arg(2)->Arg(6);

void BM_Poincare(benchmark::State& state) {
  ClassicalParams p;
  p.kappa = 2.0;
  p.lambda = 0.5;
  const std::vector<PhasePoint> seeds = seed_grid(8, 8, p.kappa);
  for (auto _ : state) {
    benchmark::DoNotOptimize(poincare(seeds, p, 50, static_cast<unsigned>(state.range(0))).samples.size());
  }
}
BENCHMARK(BM_Poincare)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
