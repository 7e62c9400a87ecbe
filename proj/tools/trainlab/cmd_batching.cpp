#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "trainlab/batching.hpp"
#include "trainlab/commands.hpp"
#include "trainlab/errors.hpp"
#include "trainlab/schedule.hpp"

namespace trainlab::cli {

namespace {

struct PackArgs {
  std::int64_t budget = 0;
  std::optional<std::int64_t> max_length;
  std::string lengths;
};

struct EpochArgs {
  double subwords = 0.0;
  std::int64_t batch = 0;
  std::int64_t gpus = 1;
  std::optional<double> steps;
};

std::int64_t parse_length(const std::string& field, const std::string& where) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != field.size()) {
    throw FormatError(where + "length '" + field + "' is not an integer");
  }
  return v;
}

// id<TAB>src_len<TAB>tgt_len per line; blank lines and '#' comments skipped.
std::vector<batching::SentencePair> read_lengths(std::istream& in, const std::string& name) {
  std::vector<batching::SentencePair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto where = name + ":" + std::to_string(line_no) + ": ";
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
    if (fields.size() != 3) {
      throw FormatError(where + "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    }
    batching::SentencePair p{fields[0], parse_length(fields[1], where), parse_length(fields[2], where)};
    try {
      batching::validate_pair(p);
    } catch (const std::invalid_argument& e) {
      throw FormatError(where + e.what());
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

nlohmann::ordered_json batch_record(std::size_t index, const batching::Batch& b) {
  nlohmann::ordered_json rec;
  rec["batch_index"] = index;
  rec["ids"] = b.ids;
  rec["bucket_max_len"] = b.bucket_max_len;
  rec["padded"] = b.padded_token_cost;
  rec["payload"] = b.payload_token_cost;
  if (b.over_budget) rec["over_budget"] = true;
  return rec;
}

int run_pack(const Context& ctx, const PackArgs& a) {
  std::vector<batching::SentencePair> pairs;
  if (a.lengths == "-") {
    pairs = read_lengths(ctx.in, "<stdin>");
  } else {
    std::ifstream in(a.lengths);
    if (!in) throw IoError("cannot open lengths file '" + a.lengths + "'");
    pairs = read_lengths(in, a.lengths);
  }
  const auto plan = batching::plan_batches(pairs, a.budget, a.max_length);
  const double exclusion_pct =
      pairs.empty() ? 0.0 : 100.0 * static_cast<double>(plan.excluded.size()) / static_cast<double>(pairs.size());
  for (const auto& b : plan.batches) {
    if (b.over_budget) {
      ctx.warn("pair '" + b.ids.front() + "' alone exceeds the budget and forms its own batch");
    }
  }

  nlohmann::ordered_json summary;
  summary["pairs"] = pairs.size();
  summary["batches"] = plan.batches.size();
  summary["excluded"] = plan.excluded.size();
  summary["exclusion_pct"] = number(exclusion_pct);
  summary["padded"] = plan.padded_tokens();
  summary["payload"] = plan.payload_tokens();
  summary["padding_efficiency"] = number(plan.padding_efficiency());

  if (ctx.format == Format::json) {
    nlohmann::ordered_json doc;
    doc["batches"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < plan.batches.size(); ++i) doc["batches"].push_back(batch_record(i, plan.batches[i]));
    doc["excluded"] = plan.excluded;
    doc["summary"] = summary;
    ctx.out << doc.dump() << '\n';
    return 0;
  }
  // The manifest is line-oriented JSON in either mode; --format json folds it
  // into one document.
  for (std::size_t i = 0; i < plan.batches.size(); ++i) {
    ctx.out << batch_record(i, plan.batches[i]).dump() << '\n';
  }
  nlohmann::ordered_json last;
  last["summary"] = summary;
  ctx.out << last.dump() << '\n';
  return 0;
}

int run_epochs(const Context& ctx, const EpochArgs& a) {
  const auto eff = schedule::effective_batch_size(a.batch, a.gpus);
  const batching::CorpusStats stats{static_cast<std::int64_t>(a.subwords), 0};
  const double per_epoch = batching::steps_per_epoch(stats, static_cast<double>(eff));
  std::vector<std::string> cols{"subwords", "effective_batch", "steps_per_epoch"};
  std::vector<Cell> row{number(a.subwords), eff, number(per_epoch)};
  if (a.steps) {
    cols.insert(cols.end(), {"steps", "epochs"});
    row.push_back(number(*a.steps));
    row.push_back(number(batching::epochs_from_steps(*a.steps, static_cast<double>(eff), stats)));
  }
  Table t("epochs", cols, true);
  t.add_row(std::move(row));
  emit(ctx, {t});
  return 0;
}

}  // namespace

void add_batching_commands(CLI::App& app, Context& ctx, Action& action) {
  auto pack_args = std::make_shared<PackArgs>();
  auto* pack = app.add_subcommand("pack", "Filter by max_length and pack pairs into token-budget batches");
  pack->add_option("--budget", pack_args->budget, "Per-GPU batch size in subwords")
      ->required()
      ->check(CLI::PositiveNumber);
  pack->add_option("--max-length", pack_args->max_length, "Exclude pairs with a longer side (default: budget)")
      ->check(CLI::PositiveNumber);
  pack->add_option("--lengths", pack_args->lengths, "TSV of id, src_len, tgt_len ('-' for stdin)")->required();
  pack->callback([&ctx, &action, pack_args] { action = [&ctx, pack_args] { return run_pack(ctx, *pack_args); }; });

  auto epoch_args = std::make_shared<EpochArgs>();
  auto* epochs = app.add_subcommand("epochs", "Steps per epoch and epochs covered by a step count");
  epochs->add_option("--subwords", epoch_args->subwords, "Corpus size in subwords")->required();
  epochs->add_option("--batch", epoch_args->batch, "Per-GPU batch size in subwords")->required();
  epochs->add_option("--gpus", epoch_args->gpus, "GPU count")->check(CLI::PositiveNumber)->capture_default_str();
  epochs->add_option("--steps", epoch_args->steps, "Training steps to convert into epochs");
  epochs->callback([&ctx, &action, epoch_args] { action = [&ctx, epoch_args] { return run_epochs(ctx, *epoch_args); }; });
}

}  // namespace trainlab::cli
