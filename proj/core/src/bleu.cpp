#include "trainlab/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "trainlab/errors.hpp"
#include "trainlab/version.hpp"
#include "unicode.hpp"

namespace trainlab::bleu {

void BleuConfig::validate() const {
  if (max_ngram_order < 1) {
    throw std::invalid_argument("bleu: max_ngram_order must be >= 1");
  }
}

namespace {

using unicode::is_number;
using unicode::is_punctuation;
using unicode::is_symbol;

// Rule 1: a non-digit followed by punctuation -> "x p ". Matches are taken
// left to right without overlap, like a single regex substitution pass.
std::u32string split_punct_after_nondigit(const std::u32string& in) {
  std::u32string out;
  out.reserve(in.size() * 2);
  std::size_t i = 0;
  while (i < in.size()) {
    if (i + 1 < in.size() && !is_number(in[i]) && is_punctuation(in[i + 1])) {
      out.push_back(in[i]);
      out.push_back(U' ');
      out.push_back(in[i + 1]);
      out.push_back(U' ');
      i += 2;
    } else {
      out.push_back(in[i]);
      ++i;
    }
  }
  return out;
}

// Rule 2: punctuation followed by a non-digit -> " p x".
std::u32string split_punct_before_nondigit(const std::u32string& in) {
  std::u32string out;
  out.reserve(in.size() * 2);
  std::size_t i = 0;
  while (i < in.size()) {
    if (i + 1 < in.size() && is_punctuation(in[i]) && !is_number(in[i + 1])) {
      out.push_back(U' ');
      out.push_back(in[i]);
      out.push_back(U' ');
      out.push_back(in[i + 1]);
      i += 2;
    } else {
      out.push_back(in[i]);
      ++i;
    }
  }
  return out;
}

// Rule 3: every symbol becomes its own token.
std::u32string isolate_symbols(const std::u32string& in) {
  std::u32string out;
  out.reserve(in.size() * 2);
  for (const auto cp : in) {
    if (is_symbol(cp)) {
      out.push_back(U' ');
      out.push_back(cp);
      out.push_back(U' ');
    } else {
      out.push_back(cp);
    }
  }
  return out;
}

// N-gram keys join tokens with a space; tokens never contain whitespace.
using NgramCounts = std::unordered_map<std::string, std::int64_t>;

NgramCounts count_ngrams(std::span<const std::string> tokens, int n) {
  NgramCounts counts;
  if (tokens.size() < static_cast<std::size_t>(n)) {
    return counts;
  }
  std::string key;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
    key = tokens[i];
    for (int j = 1; j < n; ++j) {
      key += ' ';
      key += tokens[i + static_cast<std::size_t>(j)];
    }
    ++counts[key];
  }
  return counts;
}

std::vector<std::string> prepare(const std::string& text, const BleuConfig& config) {
  return config.case_insensitive ? tokenize_international(unicode::to_lower(text)) : tokenize_international(text);
}

}  // namespace

std::vector<std::string> tokenize_international(std::string_view text) {
  auto cps = unicode::decode(text);
  std::u32string s(cps.begin(), cps.end());
  s = isolate_symbols(split_punct_before_nondigit(split_punct_after_nondigit(s)));
  std::vector<std::string> tokens;
  std::u32string current;
  for (const auto cp : s) {
    if (unicode::is_whitespace(cp)) {
      if (!current.empty()) {
        tokens.push_back(unicode::encode(current));
        current.clear();
      }
    } else {
      current.push_back(cp);
    }
  }
  if (!current.empty()) {
    tokens.push_back(unicode::encode(current));
  }
  return tokens;
}

std::string signature(const BleuConfig& config) {
  std::string sig = "BLEU+case.";
  sig += config.case_insensitive ? "lc" : "mixed";
  sig += "+numrefs.1+smooth.exp+tok.intl-v" + std::to_string(kTokenizationRulesVersion);
  if (config.max_ngram_order != 4) {
    sig += "+order." + std::to_string(config.max_ngram_order);
  }
  sig += "+version.";
  sig += version();
  return sig;
}

BleuStats::BleuStats(int max_ngram_order)
    : order_(max_ngram_order),
      matches_(static_cast<std::size_t>(std::max(max_ngram_order, 1)), 0),
      totals_(static_cast<std::size_t>(std::max(max_ngram_order, 1)), 0) {
  if (max_ngram_order < 1) {
    throw std::invalid_argument("bleu: max_ngram_order must be >= 1");
  }
}

void BleuStats::add(std::span<const std::string> hyp_tokens, std::span<const std::string> ref_tokens) {
  hyp_len_ += static_cast<std::int64_t>(hyp_tokens.size());
  ref_len_ += static_cast<std::int64_t>(ref_tokens.size());
  for (int n = 1; n <= order_; ++n) {
    const auto hyp = count_ngrams(hyp_tokens, n);
    const auto ref = count_ngrams(ref_tokens, n);
    auto& match = matches_[static_cast<std::size_t>(n - 1)];
    auto& total = totals_[static_cast<std::size_t>(n - 1)];
    for (const auto& [gram, count] : hyp) {
      total += count;
      if (const auto it = ref.find(gram); it != ref.end()) {
        match += std::min(count, it->second);
      }
    }
  }
}

BleuResult BleuStats::finalize(const BleuConfig& config) const {
  config.validate();
  if (config.max_ngram_order != order_) {
    throw std::invalid_argument("bleu: statistics were collected for a different n-gram order");
  }
  BleuResult r;
  r.signature = signature(config);
  r.matches = matches_;
  r.totals = totals_;
  r.hyp_length = hyp_len_;
  r.ref_length = ref_len_;
  r.per_order_precisions.assign(static_cast<std::size_t>(order_), 0.0);

  if (hyp_len_ == 0) {
    r.brevity_penalty = 0.0;
    return r;
  }
  r.brevity_penalty =
      hyp_len_ < ref_len_ ? std::exp(1.0 - static_cast<double>(ref_len_) / static_cast<double>(hyp_len_)) : 1.0;

  // Exponential smoothing: the k-th order with zero matches gets precision
  // 1 / (2^k * totals). An order with no hypothesis n-grams at all makes the
  // geometric mean zero.
  double log_sum = 0.0;
  double inv_count = 1.0;
  bool zero = false;
  for (std::size_t n = 0; n < static_cast<std::size_t>(order_); ++n) {
    if (totals_[n] == 0) {
      zero = true;
      break;
    }
    double p;
    if (matches_[n] == 0) {
      inv_count *= 2.0;
      p = 1.0 / (inv_count * static_cast<double>(totals_[n]));
    } else {
      p = static_cast<double>(matches_[n]) / static_cast<double>(totals_[n]);
    }
    r.per_order_precisions[n] = 100.0 * p;
    log_sum += std::log(p);
  }
  if (!zero) {
    r.score = 100.0 * r.brevity_penalty * std::exp(log_sum / static_cast<double>(order_));
  }
  return r;
}

BleuResult corpus_bleu(std::span<const std::string> hypotheses, std::span<const std::string> references,
                       const BleuConfig& config) {
  config.validate();
  if (hypotheses.size() != references.size()) {
    throw std::invalid_argument("bleu: " + std::to_string(hypotheses.size()) + " hypotheses but " +
                                std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) {
    throw std::invalid_argument("bleu: empty corpus");
  }
  BleuStats stats(config.max_ngram_order);
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    stats.add(prepare(hypotheses[i], config), prepare(references[i], config));
  }
  return stats.finalize(config);
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    lines.push_back(std::move(line));
  }
  if (in.bad()) {
    throw IoError("error reading '" + path.string() + "'");
  }
  return lines;
}

BleuResult score_translation_file(const std::filesystem::path& hyp_path, const std::filesystem::path& ref_path,
                                  const BleuConfig& config) {
  const auto hyps = read_lines(hyp_path);
  const auto refs = read_lines(ref_path);
  if (hyps.size() != refs.size()) {
    throw std::invalid_argument("bleu: translation '" + hyp_path.string() + "' has " + std::to_string(hyps.size()) +
                                " lines but reference '" + ref_path.string() + "' has " +
                                std::to_string(refs.size()));
  }
  return corpus_bleu(hyps, refs, config);
}

}  // namespace trainlab::bleu
