#include <cstdio>
#include <fstream>
#include <memory>

#include "trainlab/commands.hpp"
#include "trainlab/errors.hpp"
#include "trainlab/subword.hpp"

namespace trainlab::cli {

namespace {

struct TrainArgs {
  std::vector<std::string> inputs;
  std::size_t budget = 1000000;
  std::size_t size = 32768;
  std::size_t max_unit_chars = 20;
  std::string out;
};

struct SegmentArgs {
  std::string vocab;
  std::string input = "-";
};

struct CountArgs {
  std::string vocab;
  std::string pairs;
};

int run_train(const Context& ctx, const TrainArgs& a) {
  const std::vector<std::filesystem::path> paths(a.inputs.begin(), a.inputs.end());
  const auto sample = subword::sample_corpus(paths, a.budget);
  for (const auto& w : sample.warnings) ctx.warn(w);
  ctx.info("sampled " + std::to_string(sample.bytes) + " bytes from " + std::to_string(paths.size()) + " file(s)");
  subword::TrainOptions opts;
  opts.max_unit_chars = a.max_unit_chars;
  const auto trained = subword::train_vocab(sample.text, a.size, opts);
  for (const auto& w : trained.warnings) ctx.warn(w);
  const subword::SubwordVocab vocab(trained.vocab.units(), trained.vocab.target_size(), trained.vocab.min_count(),
                                    sample.bytes);
  subword::write_vocab(vocab, std::filesystem::path(a.out));
  Table t("vocab", {"output", "units", "target", "min_count", "sample_bytes"}, true);
  t.add_row({a.out, vocab.size(), vocab.target_size(), vocab.min_count(), vocab.sample_bytes()});
  emit(ctx, {t});
  return 0;
}

std::string piece_text(const subword::Subword& p) {
  if (!p.byte_escape) return p.text;
  char buf[8];
  std::snprintf(buf, sizeof buf, "<0x%02X>", static_cast<unsigned>(static_cast<unsigned char>(p.text[0])));
  return buf;
}

int run_segment(const Context& ctx, const SegmentArgs& a) {
  const auto vocab = subword::read_vocab(std::filesystem::path(a.vocab));
  std::ifstream file;
  if (a.input != "-") {
    file.open(a.input, std::ios::binary);
    if (!file) throw IoError("cannot open '" + a.input + "'");
  }
  std::istream& in = a.input == "-" ? ctx.in : file;
  auto lines = nlohmann::ordered_json::array();
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto words = subword::segment(line, vocab);
    if (ctx.format == Format::tsv) {
      ctx.out << subword::format_segmentation(words) << '\n';
      continue;
    }
    auto jl = nlohmann::ordered_json::array();
    for (const auto& w : words) {
      auto jw = nlohmann::ordered_json::array();
      for (const auto& p : w) jw.push_back(piece_text(p));
      jl.push_back(std::move(jw));
    }
    lines.push_back(std::move(jl));
  }
  if (ctx.format == Format::json) {
    nlohmann::ordered_json doc;
    doc["lines"] = std::move(lines);
    ctx.out << doc.dump() << '\n';
  }
  return 0;
}

int run_count(const Context& ctx, const CountArgs& a) {
  const auto vocab = subword::read_vocab(std::filesystem::path(a.vocab));
  std::ifstream in(a.pairs, std::ios::binary);
  if (!in) throw IoError("cannot open pairs file '" + a.pairs + "'");
  std::vector<std::pair<std::string, std::string>> pairs;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw FormatError(a.pairs + ":" + std::to_string(line_no) + ": expected src<TAB>tgt");
    }
    pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  const auto stats = subword::count_corpus_subwords(pairs, vocab);
  Table t("count", {"pairs", "total_subwords", "subwords_per_pair"}, true);
  const double mean = stats.pair_count == 0 ? 0.0
                                            : static_cast<double>(stats.total_subwords) /
                                                  static_cast<double>(stats.pair_count);
  t.add_row({stats.pair_count, stats.total_subwords, number(mean)});
  emit(ctx, {t});
  return 0;
}

}  // namespace

void add_vocab_commands(CLI::App& app, Context& ctx, Action& action) {
  auto* group = app.add_subcommand("vocab", "Subword vocabulary training, segmentation and counting");
  group->require_subcommand(1);

  auto train = std::make_shared<TrainArgs>();
  auto* train_cmd = group->add_subcommand("train", "Train a vocabulary from a byte-budgeted sample");
  train_cmd->add_option("--inputs", train->inputs, "Text files")->required()->expected(1, -1);
  train_cmd->add_option("--budget", train->budget, "Bytes sampled per file")->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--size", train->size, "Target vocabulary size")->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--max-unit-chars", train->max_unit_chars, "Longest candidate unit in characters")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--out", train->out, "Vocabulary file to write")->required();
  train_cmd->callback([&ctx, &action, train] { action = [&ctx, train] { return run_train(ctx, *train); }; });

  auto seg = std::make_shared<SegmentArgs>();
  auto* seg_cmd = group->add_subcommand("segment", "Segment text line by line");
  seg_cmd->add_option("--vocab", seg->vocab, "Vocabulary file")->required();
  seg_cmd->add_option("--input", seg->input, "Text file ('-' for stdin)")->capture_default_str();
  seg_cmd->callback([&ctx, &action, seg] { action = [&ctx, seg] { return run_segment(ctx, *seg); }; });

  auto count = std::make_shared<CountArgs>();
  auto* count_cmd = group->add_subcommand("count", "Corpus subwords: sum of the longer side per pair");
  count_cmd->add_option("--vocab", count->vocab, "Vocabulary file")->required();
  count_cmd->add_option("--pairs", count->pairs, "TSV of src<TAB>tgt")->required();
  count_cmd->callback([&ctx, &action, count] { action = [&ctx, count] { return run_count(ctx, *count); }; });
}

}  // namespace trainlab::cli
