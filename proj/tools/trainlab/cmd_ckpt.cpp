#include <memory>
#include <ostream>

#include "trainlab/checkpoints.hpp"
#include "trainlab/commands.hpp"

namespace trainlab::cli {

namespace {

struct AvgArgs {
  std::vector<std::string> inputs;
  std::string out;
};

struct WatchArgs {
  std::string dir;
  std::size_t n = 8;
  double min_interval = 3600.0;
  double poll = 60.0;
  double patience = 7200.0;
  std::string out_dir;
};

Cell member_names(const std::vector<std::filesystem::path>& members) {
  auto names = Cell::array();
  for (const auto& m : members) names.push_back(m.filename().string());
  return names;
}

int run_avg(const Context& ctx, const AvgArgs& a) {
  checkpoints::Averager avg;
  for (const auto& path : a.inputs) {
    avg.add(checkpoints::read_checkpoint(std::filesystem::path(path)));
    ctx.info("added " + path);
  }
  const auto result = avg.result();
  checkpoints::write_checkpoint_atomic(result, a.out);
  Table t("average", {"output", "step", "inputs", "tensors"}, true);
  t.add_row({a.out, result.step, a.inputs.size(), result.tensors.size()});
  emit(ctx, {t});
  return 0;
}

int run_watch(const Context& ctx, const WatchArgs& a) {
  checkpoints::WatchOptions opts;
  opts.window = {a.n, a.min_interval};
  opts.poll_interval = a.poll;
  opts.patience = a.patience;
  opts.output_dir = a.out_dir;
  checkpoints::SystemClock clock;
  const std::vector<std::string> cols{"output", "step", "members"};
  const bool stream = ctx.format == Format::tsv;
  if (stream) {
    Table(std::string("emitted"), cols).write_tsv(ctx.out);
    ctx.out.flush();
  }
  auto on_emit = [&](const checkpoints::Emission& e) {
    if (!stream) return;
    ctx.out << e.output.string() << '\t' << e.step << '\t' << cell_text(member_names(e.members)) << std::endl;
  };
  const auto emitted =
      checkpoints::watch_and_average(a.dir, opts, clock, on_emit, [&](const std::string& w) { ctx.warn(w); });
  if (!stream) {
    Table t("emitted", cols);
    for (const auto& e : emitted) t.add_row({e.output.string(), e.step, member_names(e.members)});
    emit(ctx, {t});
  }
  ctx.info("no new checkpoint for " + cell_text(number(a.patience)) + " s; " + std::to_string(emitted.size()) +
           " averages written");
  return 0;
}

}  // namespace

void add_ckpt_commands(CLI::App& app, Context& ctx, Action& action) {
  auto* group = app.add_subcommand("ckpt", "Checkpoint averaging");
  group->require_subcommand(1);

  auto avg = std::make_shared<AvgArgs>();
  auto* avg_cmd = group->add_subcommand("avg", "Elementwise mean of checkpoints");
  avg_cmd->add_option("--inputs", avg->inputs, "Checkpoint files")->required()->expected(1, -1);
  avg_cmd->add_option("--out", avg->out, "Output checkpoint")->required();
  avg_cmd->callback([&ctx, &action, avg] { action = [&ctx, avg] { return run_avg(ctx, *avg); }; });

  auto watch = std::make_shared<WatchArgs>();
  auto* watch_cmd = group->add_subcommand("watch", "Average a sliding window as new checkpoints appear");
  watch_cmd->add_option("--dir", watch->dir, "Directory receiving *.tlck checkpoints")->required();
  watch_cmd->add_option("--n", watch->n, "Window size")->check(CLI::PositiveNumber)->capture_default_str();
  watch_cmd->add_option("--min-interval", watch->min_interval, "Seconds between averaged checkpoints")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  watch_cmd->add_option("--poll", watch->poll, "Polling interval in seconds")->check(CLI::PositiveNumber)->capture_default_str();
  watch_cmd->add_option("--patience", watch->patience, "Stop after this many seconds without a new checkpoint")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  watch_cmd->add_option("--out-dir", watch->out_dir, "Where averages go (default <dir>/averaged)");
  watch_cmd->callback([&ctx, &action, watch] { action = [&ctx, watch] { return run_watch(ctx, *watch); }; });
}

}  // namespace trainlab::cli
