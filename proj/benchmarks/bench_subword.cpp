#include <benchmark/benchmark.h>

#include <fstream>
#include <iterator>
#include <string>

#include "trainlab/subword.hpp"

namespace {

std::string english() {
  std::ifstream in(std::string(TRAINLAB_FIXTURE_DIR) + "/subword/english.txt", std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void BM_TrainVocab(benchmark::State& state) {
  const auto text = english().substr(0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(trainlab::subword::train_vocab(text, 4096));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainVocab)->Arg(8000)->Arg(32000)->Unit(benchmark::kMillisecond);

void BM_Segment(benchmark::State& state) {
  const auto text = english();
  const auto vocab = trainlab::subword::train_vocab(text.substr(0, 32000), 4096).vocab;
  for (auto _ : state) {
    benchmark::DoNotOptimize(trainlab::subword::count_subwords(text, vocab));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_Segment)->Unit(benchmark::kMillisecond);

}  // namespace
