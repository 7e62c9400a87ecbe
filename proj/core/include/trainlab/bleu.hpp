#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trainlab::bleu {

/// Version of the tokenization rule table (docs/tokenization-rules-v1.md).
/// Bumped whenever tokenize_international changes observable output.
inline constexpr int kTokenizationRulesVersion = 1;

enum class Smoothing { exponential };
enum class Tokenization { international };

struct BleuConfig {
  int max_ngram_order = 4;
  bool case_insensitive = true;
  Smoothing smoothing = Smoothing::exponential;
  Tokenization tokenization = Tokenization::international;

  void validate() const;
};

struct BleuResult {
  double score = 0.0;  ///< percentage in [0, 100]
  /// Smoothed per-order precisions as percentages, one entry per order.
  std::vector<double> per_order_precisions;
  std::vector<std::int64_t> matches;  ///< clipped n-gram matches per order
  std::vector<std::int64_t> totals;   ///< hypothesis n-grams per order
  double brevity_penalty = 0.0;
  std::int64_t hyp_length = 0;
  std::int64_t ref_length = 0;
  std::string signature;
};

/// Splits punctuation (P*) away from non-digits and isolates symbols (S*),
/// then splits on whitespace. Rules are listed in the rule table document.
std::vector<std::string> tokenize_international(std::string_view text);

/// Canonical description of the configuration, e.g.
/// "BLEU+case.lc+numrefs.1+smooth.exp+tok.intl-v1+version.1.0.0".
std::string signature(const BleuConfig& config);

/// Sufficient statistics of one corpus; accumulate sentence by sentence.
class BleuStats {
 public:
  explicit BleuStats(int max_ngram_order = 4);

  void add(std::span<const std::string> hyp_tokens, std::span<const std::string> ref_tokens);
  BleuResult finalize(const BleuConfig& config) const;

 private:
  int order_;
  std::vector<std::int64_t> matches_;
  std::vector<std::int64_t> totals_;
  std::int64_t hyp_len_ = 0;
  std::int64_t ref_len_ = 0;
};

/// Single-reference corpus BLEU. Throws std::invalid_argument on an empty
/// corpus or mismatched lengths.
BleuResult corpus_bleu(std::span<const std::string> hypotheses, std::span<const std::string> references,
                       const BleuConfig& config = {});

/// Reads one sentence per line (CRLF tolerated) and scores the files.
BleuResult score_translation_file(const std::filesystem::path& hyp_path, const std::filesystem::path& ref_path,
                                  const BleuConfig& config = {});

/// Lines of a text file with line endings removed. Throws IoError.
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace trainlab::bleu
