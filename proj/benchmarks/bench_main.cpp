#include <benchmark/benchmark.h>

#include "coldstart/kmeans.hpp"
#include "coldstart/metrics.hpp"
#include "coldstart/select.hpp"
#include "coldstart/synthetic.hpp"

using namespace coldstart;

namespace {

synthetic::Blobs blobs(std::size_t n, std::size_t dim) {
  synthetic::BlobSpec spec;
  spec.n = n;
  spec.dim = dim;
  spec.clusters = 8;
  spec.separation = 4.0;
  return synthetic::make_blobs(spec, RngSeed{1});
}

void BM_KMeans(benchmark::State& state) {
  const auto data = blobs(static_cast<std::size_t>(state.range(0)), 64);
  KMeansConfig cfg;
  cfg.n_init = 1;
  cfg.threads = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(data.dataset, 8, cfg, RngSeed{2}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KMeans)->Args({1000, 1})->Args({10000, 1})->Args({10000, 4})->Unit(benchmark::kMillisecond);

void BM_ClusteringPlan(benchmark::State& state) {
  const auto data = blobs(2000, 32);
  KMeansConfig cfg;
  cfg.n_init = 3;
  const auto budget = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(clustering_plan(data.dataset, data.dataset.ids, budget, cfg, RngSeed{3}));
}
BENCHMARK(BM_ClusteringPlan)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Hausdorff(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  Rng rng(RngSeed{4});
  BinaryMask a(side, side), b(side, side);
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      a.set(r, c, rng.uniform01() < 0.05);
      b.set(r, c, rng.uniform01() < 0.05);
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff(a, b));
}
BENCHMARK(BM_Hausdorff)->Arg(32)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_Auprc(benchmark::State& state) {
  Rng rng(RngSeed{5});
  std::vector<ScoredLabel> items(static_cast<std::size_t>(state.range(0)));
  for (auto& it : items) {
    it.label = rng.uniform01() < 0.2 ? 1 : 0;
    it.score = rng.uniform01() + 0.3 * it.label;
  }
  for (auto _ : state) benchmark::DoNotOptimize(average_precision(items));
}
BENCHMARK(BM_Auprc)->Arg(1000)->Arg(100000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
