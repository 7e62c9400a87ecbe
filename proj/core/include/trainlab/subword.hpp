#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "trainlab/batching.hpp"

namespace trainlab::subword {

struct CorpusSample {
  std::string text;
  std::size_t bytes = 0;
  std::vector<std::string> warnings;
};

/// Takes whole lines from the start of each file while the running total
/// stays within `file_byte_budget` bytes for that file (newlines count).
/// If even the first line is over budget it is taken anyway, with a warning.
CorpusSample sample_corpus(std::span<const std::filesystem::path> paths, std::size_t file_byte_budget);

class SubwordVocab {
 public:
  SubwordVocab() = default;
  SubwordVocab(std::vector<std::string> units, std::size_t target_size, std::int64_t min_count,
               std::size_t sample_bytes);

  const std::vector<std::string>& units() const { return units_; }
  std::size_t size() const { return units_.size(); }
  std::size_t target_size() const { return target_size_; }
  std::int64_t min_count() const { return min_count_; }
  std::size_t sample_bytes() const { return sample_bytes_; }
  /// Longest unit, in code points.
  std::size_t max_unit_chars() const { return max_unit_chars_; }
  bool contains(std::string_view unit) const { return lookup_.contains(std::string(unit)); }

 private:
  std::vector<std::string> units_;
  std::unordered_set<std::string> lookup_;
  std::size_t target_size_ = 0;
  std::int64_t min_count_ = 1;
  std::size_t sample_bytes_ = 0;
  std::size_t max_unit_chars_ = 0;
};

struct TrainOptions {
  std::size_t max_unit_chars = 20;
  /// Relative band around target_size outside which a warning is issued.
  double size_tolerance = 0.10;
};

struct TrainResult {
  SubwordVocab vocab;
  std::vector<std::string> warnings;
};

/// Substring-frequency vocabulary. Candidates are every substring (up to
/// max_unit_chars code points) of every whitespace-delimited word, counted by
/// occurrence; all characters are always kept. A binary search picks the
/// min_count whose vocabulary size is nearest target_size (ties prefer the
/// smaller vocabulary). Warns when min_count <= 2.
TrainResult train_vocab(std::string_view sample, std::size_t target_size, const TrainOptions& options = {});

/// One piece of a segmented word. Characters missing from the vocabulary are
/// emitted byte by byte with byte_escape set; `text` then holds the raw byte.
struct Subword {
  std::string text;
  bool byte_escape = false;

  friend bool operator==(const Subword&, const Subword&) = default;
};

/// Greedy longest-match-first segmentation of a single word.
std::vector<Subword> segment_word(std::string_view word, const SubwordVocab& vocab);

/// Segments every whitespace-delimited word of `text`.
std::vector<std::vector<Subword>> segment(std::string_view text, const SubwordVocab& vocab);

/// Concatenation of the pieces; inverse of segment_word.
std::string join_pieces(std::span<const Subword> pieces);

/// Printable form: pieces separated by spaces, every non-final piece of a
/// word suffixed with "@@", byte escapes written as <0xNN>.
std::string format_segmentation(const std::vector<std::vector<Subword>>& words);

std::size_t count_subwords(std::string_view text, const SubwordVocab& vocab);

/// Sum over pairs of max(|segment(src)|, |segment(tgt)|).
batching::CorpusStats count_corpus_subwords(std::span<const std::pair<std::string, std::string>> pairs,
                                            const SubwordVocab& vocab);

/// Vocabulary file: "# min_count=<n> target=<n>" then one unit per line.
void write_vocab(const SubwordVocab& vocab, std::ostream& out);
void write_vocab(const SubwordVocab& vocab, const std::filesystem::path& path);
SubwordVocab read_vocab(std::istream& in, const std::string& source_name = "<stream>");
SubwordVocab read_vocab(const std::filesystem::path& path);

}  // namespace trainlab::subword
