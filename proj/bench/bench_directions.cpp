#include <benchmark/benchmark.h>
#include <omp.h>

#include "ipursuit/datagen.hpp"
#include "ipursuit/solver.hpp"

using namespace ipursuit;

namespace {

// Ambient 60, ten 12-dim clusters sharing 10 dims, 50 points each (N = 500).
const DataMatrix& workload(int n_per_cluster) {
  static std::vector<std::pair<int, DataMatrix>> cache;
  for (const auto& [n, d] : cache)
    if (n == n_per_cluster) return d;
  Rng rng(2017);
  const auto ens = make_ensemble_fully_random(60, 10, 12, 10, rng);
  cache.emplace_back(n_per_cluster, sample_points(ens, n_per_cluster, rng));
  return cache.back().second;
}

void BM_AllDirectionsParallel(benchmark::State& state) {
  const DataMatrix& d = workload(static_cast<int>(state.range(0)));
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(all_directions(d).objective_values.sum());
  state.counters["threads"] = static_cast<double>(state.range(1));
  state.counters["columns"] = static_cast<double>(d.size());
}

void BM_AllDirectionsSerial(benchmark::State& state) {
  const DataMatrix& d = workload(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(all_directions_serial(d).objective_values.sum());
  state.counters["columns"] = static_cast<double>(d.size());
}

}  // namespace

BENCHMARK(BM_AllDirectionsSerial)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AllDirectionsParallel)
    ->ArgsProduct({{20, 50}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
