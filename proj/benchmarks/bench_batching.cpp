#include <benchmark/benchmark.h>

#include <random>

#include "trainlab/batching.hpp"

namespace {

void BM_PlanBatches(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> len(1, 120);
  std::vector<trainlab::batching::SentencePair> pairs;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    pairs.push_back({"s" + std::to_string(i), len(rng), len(rng)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(trainlab::batching::plan_batches(pairs, 1500, 100));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PlanBatches)->Arg(10'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

}  // namespace
