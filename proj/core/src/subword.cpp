#include "trainlab/subword.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "trainlab/errors.hpp"
#include "unicode.hpp"

namespace trainlab::subword {

CorpusSample sample_corpus(std::span<const std::filesystem::path> paths, std::size_t file_byte_budget) {
  if (file_byte_budget == 0) {
    throw std::invalid_argument("file_byte_budget must be > 0");
  }
  CorpusSample sample;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw IoError("cannot open '" + path.string() + "'");
    }
    std::size_t used = 0;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      const std::size_t cost = line.size() + 1;
      if (used + cost > file_byte_budget) {
        if (!first) {
          break;
        }
        sample.warnings.push_back("file_byte_budget of " + std::to_string(file_byte_budget) +
                                  " bytes is smaller than the first line of '" + path.string() +
                                  "'; taking that line anyway");
      }
      sample.text += line;
      sample.text += '\n';
      used += cost;
      first = false;
      if (used >= file_byte_budget) {
        break;
      }
    }
    if (in.bad()) {
      throw IoError("error reading '" + path.string() + "'");
    }
    sample.bytes += used;
  }
  return sample;
}

SubwordVocab::SubwordVocab(std::vector<std::string> units, std::size_t target_size, std::int64_t min_count,
                           std::size_t sample_bytes)
    : units_(std::move(units)), target_size_(target_size), min_count_(min_count), sample_bytes_(sample_bytes) {
  for (const auto& u : units_) {
    if (u.empty()) {
      throw std::invalid_argument("vocabulary unit must not be empty");
    }
    if (!lookup_.insert(u).second) {
      throw std::invalid_argument("duplicate vocabulary unit '" + u + "'");
    }
    max_unit_chars_ = std::max(max_unit_chars_, unicode::code_point_offsets(u).size() - 1);
  }
}

namespace {

struct Candidate {
  std::string text;
  std::int64_t count = 0;
  bool single_char = false;
};

}  // namespace

TrainResult train_vocab(std::string_view sample, std::size_t target_size, const TrainOptions& options) {
  if (options.max_unit_chars < 1) {
    throw std::invalid_argument("max_unit_chars must be >= 1");
  }
  const auto words = unicode::split_whitespace(sample);
  if (words.empty()) {
    throw std::invalid_argument("cannot train a vocabulary on an empty sample");
  }
  std::map<std::string, std::int64_t> word_freq;
  for (const auto& w : words) {
    ++word_freq[w];
  }

  std::unordered_map<std::string, std::int64_t> counts;
  std::unordered_map<std::string, bool> is_char;
  for (const auto& [word, freq] : word_freq) {
    const auto offsets = unicode::code_point_offsets(word);
    const std::size_t n = offsets.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t max_j = std::min(n, i + options.max_unit_chars);
      for (std::size_t j = i + 1; j <= max_j; ++j) {
        auto key = word.substr(offsets[i], offsets[j] - offsets[i]);
        counts[key] += freq;
        if (j == i + 1) {
          is_char.emplace(std::move(key), true);
        }
      }
    }
  }

  std::vector<Candidate> cands;
  cands.reserve(counts.size());
  std::size_t char_count = 0;
  std::vector<std::int64_t> multi_counts;
  for (auto& [text, count] : counts) {
    const bool single = is_char.contains(text);
    char_count += single ? 1 : 0;
    if (!single) {
      multi_counts.push_back(count);
    }
    cands.push_back({text, count, single});
  }
  std::sort(multi_counts.begin(), multi_counts.end());

  // Vocabulary size at threshold m: all characters plus multi-character
  // substrings seen at least m times. Non-increasing in m.
  const auto size_at = [&](std::int64_t m) {
    const auto it = std::lower_bound(multi_counts.begin(), multi_counts.end(), m);
    return char_count + static_cast<std::size_t>(multi_counts.end() - it);
  };
  const std::int64_t max_count = multi_counts.empty() ? 1 : multi_counts.back();

  // Smallest m in [1, max_count + 1] with size_at(m) <= target.
  std::int64_t lo = 1;
  std::int64_t hi = max_count + 1;
  while (lo < hi) {
    const auto mid = lo + (hi - lo) / 2;
    if (size_at(mid) <= target_size) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  std::int64_t min_count = lo;
  if (min_count > 1) {
    const auto under = size_at(min_count);
    const auto over = size_at(min_count - 1);
    const auto d_under = target_size - std::min(under, target_size);
    const auto d_over = over - target_size;
    if (d_over < d_under) {
      min_count -= 1;
    }
  }

  std::vector<Candidate> chosen;
  for (auto& c : cands) {
    if (c.single_char || c.count >= min_count) {
      chosen.push_back(std::move(c));
    }
  }
  std::sort(chosen.begin(), chosen.end(), [](const Candidate& a, const Candidate& b) {
    return a.count != b.count ? a.count > b.count : a.text < b.text;
  });
  std::vector<std::string> units;
  units.reserve(chosen.size());
  for (auto& c : chosen) {
    units.push_back(std::move(c.text));
  }

  TrainResult result{SubwordVocab(std::move(units), target_size, min_count, sample.size()), {}};
  if (min_count <= 2) {
    result.warnings.push_back("min_count=" + std::to_string(min_count) +
                              " is very low: units are estimated from substrings seen only once or twice; "
                              "the sample is probably too small (increase the byte budget)");
  }
  const double size = static_cast<double>(result.vocab.size());
  const double target = static_cast<double>(target_size);
  if (std::abs(size - target) > options.size_tolerance * target) {
    result.warnings.push_back("vocabulary has " + std::to_string(result.vocab.size()) +
                              " units, outside the tolerance band around the target of " +
                              std::to_string(target_size));
  }
  return result;
}

std::vector<Subword> segment_word(std::string_view word, const SubwordVocab& vocab) {
  std::vector<Subword> pieces;
  const auto offsets = unicode::code_point_offsets(word);
  const std::size_t n = offsets.size() - 1;
  const std::size_t longest = std::max<std::size_t>(vocab.max_unit_chars(), 1);
  std::size_t i = 0;
  while (i < n) {
    bool matched = false;
    for (std::size_t len = std::min(longest, n - i); len >= 1; --len) {
      const auto piece = word.substr(offsets[i], offsets[i + len] - offsets[i]);
      if (vocab.contains(piece)) {
        pieces.push_back({std::string(piece), false});
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) {
      for (std::size_t b = offsets[i]; b < offsets[i + 1]; ++b) {
        pieces.push_back({std::string(1, word[b]), true});
      }
      ++i;
    }
  }
  return pieces;
}

std::vector<std::vector<Subword>> segment(std::string_view text, const SubwordVocab& vocab) {
  std::vector<std::vector<Subword>> out;
  for (const auto& w : unicode::split_whitespace(text)) {
    out.push_back(segment_word(w, vocab));
  }
  return out;
}

std::string join_pieces(std::span<const Subword> pieces) {
  std::string out;
  for (const auto& p : pieces) {
    out += p.text;
  }
  return out;
}

std::string format_segmentation(const std::vector<std::vector<Subword>>& words) {
  std::string out;
  for (std::size_t w = 0; w < words.size(); ++w) {
    for (std::size_t i = 0; i < words[w].size(); ++i) {
      if (!out.empty()) {
        out += ' ';
      }
      const auto& p = words[w][i];
      if (p.byte_escape) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "<0x%02X>", static_cast<unsigned>(static_cast<unsigned char>(p.text[0])));
        out += buf;
      } else {
        out += p.text;
      }
      if (i + 1 < words[w].size()) {
        out += "@@";
      }
    }
  }
  return out;
}

std::size_t count_subwords(std::string_view text, const SubwordVocab& vocab) {
  std::size_t n = 0;
  for (const auto& w : unicode::split_whitespace(text)) {
    n += segment_word(w, vocab).size();
  }
  return n;
}

batching::CorpusStats count_corpus_subwords(std::span<const std::pair<std::string, std::string>> pairs,
                                            const SubwordVocab& vocab) {
  batching::CorpusStats stats;
  for (const auto& [src, tgt] : pairs) {
    stats.total_subwords += static_cast<std::int64_t>(std::max(count_subwords(src, vocab), count_subwords(tgt, vocab)));
    ++stats.pair_count;
  }
  return stats;
}

void write_vocab(const SubwordVocab& vocab, std::ostream& out) {
  out << "# min_count=" << vocab.min_count() << " target=" << vocab.target_size() << '\n';
  for (const auto& u : vocab.units()) {
    out << u << '\n';
  }
  if (!out) {
    throw IoError("failed to write vocabulary");
  }
}

void write_vocab(const SubwordVocab& vocab, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  write_vocab(vocab, out);
}

SubwordVocab read_vocab(std::istream& in, const std::string& source_name) {
  std::string header;
  if (!std::getline(in, header)) {
    throw FormatError(source_name + ": empty vocabulary file");
  }
  long long min_count = 0;
  unsigned long long target = 0;
  if (std::sscanf(header.c_str(), "# min_count=%lld target=%llu", &min_count, &target) != 2) {
    throw FormatError(source_name + ":1: expected '# min_count=<n> target=<n>' header");
  }
  std::vector<std::string> units;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    units.push_back(line);
  }
  try {
    return SubwordVocab(std::move(units), static_cast<std::size_t>(target), min_count, 0);
  } catch (const std::invalid_argument& e) {
    throw FormatError(source_name + ": " + e.what());
  }
}

SubwordVocab read_vocab(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open vocabulary '" + path.string() + "'");
  }
  return read_vocab(in, path.string());
}

}  // namespace trainlab::subword
