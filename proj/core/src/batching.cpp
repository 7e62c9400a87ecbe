#include "trainlab/batching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace trainlab::batching {

void validate_pair(const SentencePair& pair) {
  if (pair.src_len < 0 || pair.tgt_len < 0) {
    throw std::invalid_argument("pair '" + pair.id + "': negative length");
  }
  if (pair.src_len == 0 && pair.tgt_len == 0) {
    throw std::invalid_argument("pair '" + pair.id + "': both sides are empty");
  }
}

std::int64_t pair_cost(const SentencePair& pair) { return std::max(pair.src_len, pair.tgt_len); }

double Batch::padding_efficiency() const {
  return padded_token_cost == 0 ? 1.0
                                : static_cast<double>(payload_token_cost) / static_cast<double>(padded_token_cost);
}

std::int64_t BatchPlan::padded_tokens() const {
  return std::accumulate(batches.begin(), batches.end(), std::int64_t{0},
                         [](std::int64_t acc, const Batch& b) { return acc + b.padded_token_cost; });
}

std::int64_t BatchPlan::payload_tokens() const {
  return std::accumulate(batches.begin(), batches.end(), std::int64_t{0},
                         [](std::int64_t acc, const Batch& b) { return acc + b.payload_token_cost; });
}

double BatchPlan::padding_efficiency() const {
  const auto padded = padded_tokens();
  return padded == 0 ? 1.0 : static_cast<double>(payload_tokens()) / static_cast<double>(padded);
}

CorpusStats corpus_stats(std::span<const SentencePair> pairs) {
  CorpusStats stats;
  for (const auto& p : pairs) {
    validate_pair(p);
    stats.total_subwords += pair_cost(p);
    ++stats.pair_count;
  }
  return stats;
}

FilterResult filter_max_length(std::span<const SentencePair> pairs, std::optional<std::int64_t> max_length,
                               std::int64_t batch_size) {
  if (batch_size <= 0) {
    throw std::invalid_argument("batch_size must be > 0");
  }
  if (max_length && *max_length <= 0) {
    throw std::invalid_argument("max_length must be > 0");
  }
  const std::int64_t threshold = max_length.value_or(batch_size);
  FilterResult out;
  for (const auto& p : pairs) {
    if (p.src_len > threshold || p.tgt_len > threshold) {
      out.excluded.push_back(p);
    } else {
      out.kept.push_back(p);
    }
  }
  return out;
}

namespace {

Batch open_batch(const SentencePair& p, std::int64_t cost) {
  Batch b;
  b.ids.push_back(p.id);
  b.bucket_max_len = cost;
  b.payload_token_cost = cost;
  return b;
}

void close_batch(Batch& b, std::int64_t budget, std::vector<Batch>& out) {
  b.padded_token_cost = b.bucket_max_len * static_cast<std::int64_t>(b.ids.size());
  b.over_budget = b.padded_token_cost > budget;
  out.push_back(std::move(b));
}

}  // namespace

BatchPlan GreedySortedPacker::pack(std::span<const SentencePair> pairs, std::int64_t budget) const {
  if (budget <= 0) {
    throw std::invalid_argument("token budget must be > 0");
  }
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pair_cost(pairs[a]) < pair_cost(pairs[b]); });

  BatchPlan plan;
  std::optional<Batch> current;
  for (const auto idx : order) {
    const auto& p = pairs[idx];
    const auto cost = pair_cost(p);
    if (current) {
      // Ascending order: the candidate's cost becomes the new bucket max.
      const auto new_max = std::max(current->bucket_max_len, cost);
      const auto new_count = static_cast<std::int64_t>(current->ids.size()) + 1;
      if (new_max * new_count <= budget) {
        current->ids.push_back(p.id);
        current->bucket_max_len = new_max;
        current->payload_token_cost += cost;
        continue;
      }
      close_batch(*current, budget, plan.batches);
    }
    current = open_batch(p, cost);
  }
  if (current) {
    close_batch(*current, budget, plan.batches);
  }
  return plan;
}

BatchPlan bucket_and_pack(std::span<const SentencePair> pairs, std::int64_t batch_size) {
  return GreedySortedPacker{}.pack(pairs, batch_size);
}

BatchPlan plan_batches(std::span<const SentencePair> pairs, std::int64_t batch_size,
                       std::optional<std::int64_t> max_length, const BatchPacker& packer) {
  auto filtered = filter_max_length(pairs, max_length, batch_size);
  BatchPlan plan = packer.pack(filtered.kept, batch_size);
  plan.excluded.reserve(filtered.excluded.size());
  for (auto& p : filtered.excluded) {
    plan.excluded.push_back(std::move(p.id));
  }
  return plan;
}

double steps_per_epoch(const CorpusStats& stats, double effective_batch) {
  if (!(effective_batch > 0.0)) {
    throw std::invalid_argument("effective batch must be > 0");
  }
  return static_cast<double>(stats.total_subwords) / effective_batch;
}

double epochs_from_steps(double steps, double effective_batch, const CorpusStats& stats) {
  if (stats.total_subwords <= 0) {
    throw std::invalid_argument("corpus has no subwords");
  }
  if (steps < 0.0 || effective_batch < 0.0) {
    throw std::invalid_argument("steps and effective batch must be non-negative");
  }
  return steps * effective_batch / static_cast<double>(stats.total_subwords);
}

double throughput(double steps_per_hour, double effective_batch) {
  if (steps_per_hour < 0.0 || effective_batch < 0.0) {
    throw std::invalid_argument("throughput inputs must be non-negative");
  }
  return steps_per_hour * effective_batch;
}

std::vector<double> exclusion_stats(std::span<const SentencePair> pairs, std::span<const std::int64_t> thresholds) {
  if (pairs.empty()) {
    throw std::invalid_argument("exclusion statistics of an empty corpus are undefined");
  }
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (thresholds[i] <= 0) {
      throw std::invalid_argument("thresholds must be positive");
    }
    if (i > 0 && thresholds[i] < thresholds[i - 1]) {
      throw std::invalid_argument("thresholds must be sorted ascending");
    }
  }
  // Per-pair longest side; a pair is excluded at T iff longest > T.
  std::vector<std::int64_t> longest;
  longest.reserve(pairs.size());
  for (const auto& p : pairs) {
    longest.push_back(pair_cost(p));
  }
  std::sort(longest.begin(), longest.end());
  std::vector<double> out;
  out.reserve(thresholds.size());
  const auto n = static_cast<double>(longest.size());
  for (const auto t : thresholds) {
    const auto over = longest.end() - std::upper_bound(longest.begin(), longest.end(), t);
    out.push_back(100.0 * static_cast<double>(over) / n);
  }
  return out;
}

}  // namespace trainlab::batching
