#include <benchmark/benchmark.h>

#include "latrev/mathieu.hpp"

namespace {

void BM_CharValue(benchmark::State& state) {
  const int truncation = static_cast<int>(state.range(0));
  double nu = 0.37;
  for (auto _ : state) {
    benchmark::DoNotOptimize(latrev::mathieu::char_value_at_truncation(nu, 16.0, truncation));
    nu += 1e-9;  // defeat the cache
  }
}
BENCHMARK(BM_CharValue)->Arg(32)->Arg(64)->Arg(128);

void BM_BandStructure(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(latrev::mathieu::band_structure(5, static_cast<int>(state.range(0)), 4.0));
  }
}
BENCHMARK(BM_BandStructure)->Arg(65)->Arg(257);

}  // namespace

BENCHMARK_MAIN();
