// Serial reference kernels against their OpenMP counterparts.
// Thread count follows OMP_NUM_THREADS.

#include "breakscope/cost_kernels.hpp"
#include "breakscope/factors.hpp"
#include "breakscope/segment_stats.hpp"
#include "breakscope/sim_lab.hpp"

#include <benchmark/benchmark.h>

namespace bs = breakscope;

namespace {

bs::SegmentStats stats_for(bs::Index t) {
  bs::SimulationSpec spec;
  spec.periods = t;
  spec.seed = 1;
  const bs::SimulatedTruth truth = bs::simulate_panel(spec);
  return bs::segment_stats(bs::extract_pseudo_factors(truth.panel, 3));
}

void BM_CostTableSerial(benchmark::State& state) {
  const bs::SegmentStats stats = stats_for(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bs::build_cost_table_serial(stats, 10));
}

void BM_CostTableParallel(benchmark::State& state) {
  const bs::SegmentStats stats = stats_for(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bs::build_cost_table(stats, 10));
}

void BM_SuffixDpSerial(benchmark::State& state) {
  const bs::CostTable table = bs::build_cost_table(stats_for(state.range(0)), 10);
  for (auto _ : state) benchmark::DoNotOptimize(bs::suffix_dp_serial(table, 6));
}

void BM_SuffixDpParallel(benchmark::State& state) {
  const bs::CostTable table = bs::build_cost_table(stats_for(state.range(0)), 10);
  for (auto _ : state) benchmark::DoNotOptimize(bs::suffix_dp(table, 6));
}

void BM_MonteCarloSerial(benchmark::State& state) {
  bs::SimulationSpec spec;
  for (auto _ : state) benchmark::DoNotOptimize(bs::monte_carlo_serial(spec, state.range(0), true, 2, 0));
}

void BM_MonteCarloParallel(benchmark::State& state) {
  bs::SimulationSpec spec;
  for (auto _ : state) benchmark::DoNotOptimize(bs::monte_carlo(spec, state.range(0), true, 2, 0));
}

}  // namespace

BENCHMARK(BM_CostTableSerial)->Arg(200)->Arg(600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CostTableParallel)->Arg(200)->Arg(600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SuffixDpSerial)->Arg(200)->Arg(600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SuffixDpParallel)->Arg(200)->Arg(600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloSerial)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
