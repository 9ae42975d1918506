// Serial reference vs OpenMP fan-out for replica batches.

#include <benchmark/benchmark.h>

#include "storenet/ctmc.hpp"
#include "storenet/replicas.hpp"

namespace {

using namespace storenet;

void run_batch(benchmark::State& state, Execution exec) {
  const ModelParams p{1, 1, 1, 2};
  const std::int64_t N = state.range(0);
  const ScaledParams s{N, ExtendedCount(2 * N)};
  const SystemState init = state_from_scaled({0.5, 0.25}, N);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto t1 = map_replicas(
        32, [&](std::size_t r) { return first_saturation_time(p, s, init, 10.0, seed, r); }, exec);
    benchmark::DoNotOptimize(t1);
    ++seed;
  }
  state.SetItemsProcessed(state.iterations() * 32);
}

void BM_ReplicasSerial(benchmark::State& state) { run_batch(state, Execution::Serial); }
void BM_ReplicasParallel(benchmark::State& state) { run_batch(state, Execution::Parallel); }

BENCHMARK(BM_ReplicasSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicasParallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
