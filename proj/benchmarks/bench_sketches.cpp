#include <benchmark/benchmark.h>

#include <cstdint>
#include <numeric>
#include <vector>

#include "sketchrec/adaptive.hpp"
#include "sketchrec/count_min.hpp"
#include "sketchrec/pipeline.hpp"
#include "sketchrec/poly_hash.hpp"
#include "sketchrec/stream.hpp"

using namespace sketchrec;

static void BM_TabulateHash(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto indep = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    TabulatedHashes t(1, n, 400, indep, 42);
    benchmark::DoNotOptimize(t(0, n - 1));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_TabulateHash)->Args({1 << 16, 8})->Args({1 << 16, 600});

static void BM_CountMinUpdate(benchmark::State& state) {
  CountMinG3 cm(1 << 16, 0.05, 0.01, 7);
  const TurnstileStream s = gen_zipf(1 << 16, 1.1, 20000, StreamMode::strict, 3, 0.2);
  for (auto _ : state) {
    for (const auto& u : s.updates) cm.update(u.index, u.delta);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * s.updates.size()));
}
BENCHMARK(BM_CountMinUpdate);

static void BM_CountMinQuery(benchmark::State& state) {
  CountMinG3 cm(1 << 16, 0.05, 0.01, 7);
  cm.ingest(gen_zipf(1 << 16, 1.1, 20000, StreamMode::strict, 3, 0.2));
  for (auto _ : state) benchmark::DoNotOptimize(cm.query());
}
BENCHMARK(BM_CountMinQuery)->Unit(benchmark::kMillisecond);

static void BM_PipelineRecover(benchmark::State& state) {
  const auto schedule = state.range(0) == 0 ? Schedule::quadratic : Schedule::fast;
  const std::size_t n = 1 << 14, k = 16;
  const double eps = 0.1;
  const SparseRecoveryPipeline pipe(n, k, eps, schedule, 11);
  const PlantedSignal sig = gen_power_law(n, k, 0.5, 1.0, 0.01, 5);
  const auto y = pipe.measure(sig.x.view());
  for (auto _ : state) benchmark::DoNotOptimize(pipe.recover(y));
}
BENCHMARK(BM_PipelineRecover)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_OneSparse(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n, 1e-3);
  x[n / 3] = 10;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    std::vector<std::uint32_t> u(n);
    std::iota(u.begin(), u.end(), 0u);
    MeasurementOracle oracle(x);
    benchmark::DoNotOptimize(one_sparse_recover(oracle, std::move(u), ++seed));
  }
}
BENCHMARK(BM_OneSparse)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK_MAIN();
