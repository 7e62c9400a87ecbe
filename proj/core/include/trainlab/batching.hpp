#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trainlab::batching {

/// Subword lengths of one training example. A pair costs
/// max(src_len, tgt_len) subwords of batch budget.
struct SentencePair {
  std::string id;
  std::int64_t src_len = 0;
  std::int64_t tgt_len = 0;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

/// Throws std::invalid_argument for negative lengths or a pair that is empty
/// on both sides.
void validate_pair(const SentencePair& pair);

std::int64_t pair_cost(const SentencePair& pair);

struct Batch {
  std::vector<std::string> ids;
  std::int64_t bucket_max_len = 0;
  std::int64_t padded_token_cost = 0;   ///< bucket_max_len * ids.size()
  std::int64_t payload_token_cost = 0;  ///< sum of pair costs
  bool over_budget = false;             ///< singleton whose pair alone exceeds the budget

  double padding_efficiency() const;
};

struct BatchPlan {
  std::vector<Batch> batches;
  std::vector<std::string> excluded;

  std::int64_t padded_tokens() const;
  std::int64_t payload_tokens() const;
  /// payload / padded over the whole plan; 1 for an empty plan.
  double padding_efficiency() const;
};

struct CorpusStats {
  std::int64_t total_subwords = 0;
  std::int64_t pair_count = 0;
};

CorpusStats corpus_stats(std::span<const SentencePair> pairs);

struct FilterResult {
  std::vector<SentencePair> kept;
  std::vector<SentencePair> excluded;
};

/// Drops every pair whose source or target exceeds the threshold. Without an
/// explicit max_length the threshold is batch_size.
FilterResult filter_max_length(std::span<const SentencePair> pairs, std::optional<std::int64_t> max_length,
                               std::int64_t batch_size);

/// Strategy for cutting length-filtered pairs into token-budget batches.
class BatchPacker {
 public:
  virtual ~BatchPacker() = default;
  virtual BatchPlan pack(std::span<const SentencePair> pairs, std::int64_t budget) const = 0;
};

/// Stable-sorts pairs by cost and closes the running batch whenever the next
/// pair would push bucket_max_len * count over the budget.
class GreedySortedPacker final : public BatchPacker {
 public:
  BatchPlan pack(std::span<const SentencePair> pairs, std::int64_t budget) const override;
};

BatchPlan bucket_and_pack(std::span<const SentencePair> pairs, std::int64_t batch_size);

/// filter_max_length followed by bucket_and_pack; excluded ids end up in the plan.
BatchPlan plan_batches(std::span<const SentencePair> pairs, std::int64_t batch_size,
                       std::optional<std::int64_t> max_length, const BatchPacker& packer = GreedySortedPacker{});

double steps_per_epoch(const CorpusStats& stats, double effective_batch);
double epochs_from_steps(double steps, double effective_batch, const CorpusStats& stats);

/// Subwords per hour from steps per hour and the effective batch size.
double throughput(double steps_per_hour, double effective_batch);

/// Percentage of pairs with either side longer than each threshold.
/// Thresholds must be positive and ascending; an empty corpus is an error.
std::vector<double> exclusion_stats(std::span<const SentencePair> pairs, std::span<const std::int64_t> thresholds);

}  // namespace trainlab::batching
