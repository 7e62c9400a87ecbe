#include <memory>

#include "trainlab/bleu.hpp"
#include "trainlab/commands.hpp"

namespace trainlab::cli {

namespace {

struct BleuArgs {
  std::string translation;
  std::string reference;
  bool case_sensitive = false;
};

int run_bleu(const Context& ctx, const BleuArgs& a) {
  bleu::BleuConfig cfg;
  cfg.case_insensitive = !a.case_sensitive;
  const auto r = bleu::score_translation_file(a.translation, a.reference, cfg);
  if (ctx.format == Format::json) {
    nlohmann::ordered_json doc;
    doc["score"] = number(r.score);
    auto precisions = nlohmann::ordered_json::array();
    for (double p : r.per_order_precisions) precisions.push_back(number(p));
    doc["precisions"] = precisions;
    doc["matches"] = r.matches;
    doc["totals"] = r.totals;
    doc["brevity_penalty"] = number(r.brevity_penalty);
    doc["hyp_length"] = r.hyp_length;
    doc["ref_length"] = r.ref_length;
    doc["signature"] = r.signature;
    ctx.out << doc.dump() << '\n';
    return 0;
  }
  ctx.out << "BLEU = " << cell_text(number(r.score)) << '\n' << r.signature << '\n';
  std::string detail = "precisions";
  for (double p : r.per_order_precisions) detail += " " + cell_text(number(p));
  ctx.info(detail + "; BP " + cell_text(number(r.brevity_penalty)) + "; hyp_len " + std::to_string(r.hyp_length) +
           "; ref_len " + std::to_string(r.ref_length));
  return 0;
}

}  // namespace

void add_bleu_command(CLI::App& app, Context& ctx, Action& action) {
  auto args = std::make_shared<BleuArgs>();
  auto* cmd = app.add_subcommand("bleu", "Corpus BLEU of a translation against one reference");
  cmd->add_option("--translation", args->translation, "Hypothesis file, one sentence per line")->required();
  cmd->add_option("--reference", args->reference, "Reference file, one sentence per line")->required();
  cmd->add_flag("--case-sensitive", args->case_sensitive, "Do not lowercase before matching");
  cmd->callback([&ctx, &action, args] { action = [&ctx, args] { return run_bleu(ctx, *args); }; });
}

}  // namespace trainlab::cli
