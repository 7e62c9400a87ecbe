#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "trainlab/checkpoints.hpp"

namespace {

trainlab::checkpoints::Checkpoint make_checkpoint(std::size_t elements, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> val(0.0f, 1.0f);
  std::vector<float> data(elements);
  for (auto& x : data) x = val(rng);
  trainlab::checkpoints::Checkpoint c;
  c.step = seed;
  c.tensors["weights"] = {{static_cast<std::uint64_t>(elements)}, std::move(data)};
  return c;
}

void BM_Average8(benchmark::State& state) {
  std::vector<trainlab::checkpoints::Checkpoint> set;
  for (std::uint64_t i = 0; i < 8; ++i) set.push_back(make_checkpoint(static_cast<std::size_t>(state.range(0)), i));
  for (auto _ : state) {
    benchmark::DoNotOptimize(trainlab::checkpoints::average_checkpoints(set));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 8);
}
BENCHMARK(BM_Average8)->Arg(1 << 16)->Arg(1 << 22)->Unit(benchmark::kMillisecond);

void BM_RoundTrip(benchmark::State& state) {
  const auto c = make_checkpoint(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    trainlab::checkpoints::write_checkpoint(c, buf);
    benchmark::DoNotOptimize(trainlab::checkpoints::read_checkpoint(buf));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0) * 4);
}
BENCHMARK(BM_RoundTrip)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

}  // namespace
