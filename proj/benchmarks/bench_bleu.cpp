#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "trainlab/bleu.hpp"

namespace {

std::vector<std::string> random_corpus(std::size_t lines, std::uint64_t seed) {
  static const std::vector<std::string> words{"the", "model", "was", "trained", "on", "data", ",", "and",
                                              "it", "scored", "well", ".", "très", "bien", "$5", "3.14"};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < lines; ++i) {
    std::string s;
    for (int w = 0; w < 25; ++w) s += words[pick(rng)] + " ";
    out.push_back(s);
  }
  return out;
}

void BM_Tokenize(benchmark::State& state) {
  const auto lines = random_corpus(100, 1);
  for (auto _ : state) {
    for (const auto& l : lines) benchmark::DoNotOptimize(trainlab::bleu::tokenize_international(l));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(lines.size()));
}
BENCHMARK(BM_Tokenize);

void BM_CorpusBleu(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto hyps = random_corpus(n, 2);
  const auto refs = random_corpus(n, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(trainlab::bleu::corpus_bleu(hyps, refs));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CorpusBleu)->Arg(100)->Arg(3000);

}  // namespace

BENCHMARK_MAIN();
