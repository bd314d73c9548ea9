#include <benchmark/benchmark.h>

#include "opera/analysis.hpp"
#include "opera/graph.hpp"
#include "opera/routing.hpp"
#include "opera/schedule.hpp"
#include "opera/sim.hpp"
#include "opera/topology.hpp"
#include "opera/workload.hpp"

using namespace opera;

namespace {

TimingParams bench_timing() {
  TimingParams t;
  t.epsilon_override = 90e-6;
  return t;
}

const SliceSchedule& full_schedule() {
  static SliceSchedule sched = build_schedule(build_opera(12, 108, 1), bench_timing());
  return sched;
}

}  // namespace

static void BM_Factorize(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto ms = factorize_complete_graph(n, 1);
    benchmark::DoNotOptimize(ms);
  }
}
BENCHMARK(BM_Factorize)->Arg(8)->Arg(108)->Arg(432);

static void BM_BuildSchedule(benchmark::State& state) {
  auto topo = build_opera(12, 108, 1);
  auto t = bench_timing();
  for (auto _ : state) {
    auto sched = build_schedule(topo, t);
    benchmark::DoNotOptimize(sched);
  }
}
BENCHMARK(BM_BuildSchedule)->Unit(benchmark::kMillisecond);

static void BM_SlicePathStats(benchmark::State& state) {
  const auto& sched = full_schedule();
  for (auto _ : state) {
    auto rows = slice_metrics(sched, false);
    benchmark::DoNotOptimize(rows);
  }
}
BENCHMARK(BM_SlicePathStats)->Unit(benchmark::kMillisecond);

static void BM_SpectralGap(benchmark::State& state) {
  Graph g = full_schedule().slices[0].union_graph();
  for (auto _ : state) {
    auto info = spectral_info(g);
    benchmark::DoNotOptimize(info);
  }
}
BENCHMARK(BM_SpectralGap)->Unit(benchmark::kMillisecond);

static void BM_DirectCoverage(benchmark::State& state) {
  const auto& sched = full_schedule();
  for (auto _ : state) {
    auto cov = direct_coverage(sched);
    benchmark::DoNotOptimize(cov);
  }
}
BENCHMARK(BM_DirectCoverage)->Unit(benchmark::kMillisecond);

static void BM_CycleTables(benchmark::State& state) {
  auto sched = build_schedule(build_opera(8, 8, 1), bench_timing());
  for (auto _ : state) {
    auto tables = build_cycle_tables(sched);
    benchmark::DoNotOptimize(tables);
  }
}
BENCHMARK(BM_CycleTables)->Unit(benchmark::kMillisecond);

static void BM_SimShuffle(benchmark::State& state) {
  auto sched = build_schedule(build_opera(8, 8, 1), bench_timing());
  auto trace = gen_shuffle(50'000, sched.topology.num_hosts(), 0.0, 1);
  SimParams p;
  p.vlb_enabled = false;
  for (auto _ : state) {
    auto rep = run_opera(sched, trace, p, 1);
    benchmark::DoNotOptimize(rep);
  }
}
BENCHMARK(BM_SimShuffle)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
