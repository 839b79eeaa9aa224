#include <benchmark/benchmark.h>

#include "latrev/quantum.hpp"

using namespace latrev;

namespace {

// One drive period at 1000 steps, per grid size.
void BM_Period(benchmark::State& state) {
  const int points = static_cast<int>(state.range(0));
  const quantum::Grid g{points / 64.0 * constants::kPi, points};
  const ScaledParams p = ScaledParams::from_effective_depth(0.5, 16.0, 0.3);
  const quantum::Wavefunction w = quantum::init_gaussian(g, constants::kPi / 2, 0.0, 0.5, 0.5);
  quantum::EvolveOptions o;
  o.tau_end = constants::kTwoPi;
  o.record_overlaps = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(quantum::evolve(g, w, p, o).max_norm_drift);
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Period)->Args({512, 0})->Args({2048, 0})->Args({2048, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
