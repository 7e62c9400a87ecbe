#include <memory>
#include <optional>

#include "trainlab/commands.hpp"
#include "trainlab/curves.hpp"
#include "trainlab/numeric_format.hpp"

namespace trainlab::cli {

namespace {

struct CurveSelection {
  std::string events;
  std::string metric = "BLEU";
  std::optional<std::string> run;
};

struct TtsArgs {
  CurveSelection sel;
  double threshold = 0.0;
  std::size_t smooth = 1;
  std::optional<double> throughput;
  bool strict = false;
};

struct PlotArgs {
  CurveSelection sel;
  std::string axis = "hours";
  std::optional<double> batch;
  std::int64_t gpus = 1;
};

struct SpeedArgs {
  CurveSelection sel;
  double window = 3600.0;
};

void add_selection(CLI::App* cmd, CurveSelection& sel) {
  cmd->add_option("--events", sel.events, "JSON-lines event log")->required();
  cmd->add_option("--metric", sel.metric, "Metric name")->capture_default_str();
  cmd->add_option("--run", sel.run, "Only this run");
}

std::vector<curves::Curve> select(const CurveSelection& sel) {
  std::vector<curves::Curve> picked;
  for (auto& c : curves::ingest_events(std::filesystem::path(sel.events))) {
    if (c.metric_name() == sel.metric && (!sel.run || c.source_run() == *sel.run)) {
      picked.push_back(std::move(c));
    }
  }
  if (picked.empty()) {
    throw std::invalid_argument("no curve for metric '" + sel.metric + "'" + (sel.run ? " in run '" + *sel.run + "'" : "") +
                                " in " + sel.events);
  }
  return picked;
}

int run_tts(const Context& ctx, const TtsArgs& a) {
  std::vector<std::string> cols{"run", "metric", "threshold", "achieved", "tts_hours", "step"};
  if (a.throughput) cols.push_back("examples");
  Table t("tts", cols);
  bool all_achieved = true;
  for (const auto& c : select(a.sel)) {
    const auto r = curves::time_till_score(c, a.threshold, {a.smooth});
    all_achieved = all_achieved && r.has_value();
    std::vector<Cell> row{c.source_run(), c.metric_name(), number(a.threshold), r.has_value()};
    row.push_back(r ? number(r->wall_time / 3600.0) : Cell());
    row.push_back(r ? Cell(r->step) : Cell());
    if (a.throughput) {
      const auto ets = curves::examples_till_score(r ? std::optional<double>(r->wall_time / 3600.0) : std::nullopt,
                                                   *a.throughput);
      row.push_back(ets ? number(*ets) : Cell());
    }
    t.add_row(std::move(row));
    if (!r) ctx.warn("run '" + c.source_run() + "' never stays at or above " + format_number(a.threshold));
  }
  emit(ctx, {t});
  if (a.strict && !all_achieved) throw StrictFailure{};
  return 0;
}

int run_plot(const Context& ctx, const PlotArgs& a) {
  const auto axis = curves::parse_x_axis(a.axis);
  std::optional<double> eff;
  if (a.batch) eff = *a.batch * static_cast<double>(a.gpus);
  const auto picked = select(a.sel);
  if (ctx.format == Format::json) {
    nlohmann::ordered_json doc;
    doc["axis"] = curves::to_string(axis);
    doc["series"] = nlohmann::ordered_json::array();
    for (const auto& c : picked) {
      nlohmann::ordered_json s;
      s["run"] = c.source_run();
      s["metric"] = c.metric_name();
      s["points"] = nlohmann::ordered_json::array();
      for (const auto& [x, v] : curves::plot_series(c, axis, eff)) {
        s["points"].push_back({number(x), number(v)});
      }
      doc["series"].push_back(std::move(s));
    }
    ctx.out << doc.dump() << '\n';
    return 0;
  }
  for (std::size_t i = 0; i < picked.size(); ++i) {
    if (picked.size() > 1) ctx.out << (i ? "\n\n" : "") << "# run " << picked[i].source_run() << '\n';
    ctx.out << curves::emit_plot_data(picked[i], axis, eff);
  }
  return 0;
}

int run_speed(const Context& ctx, const SpeedArgs& a) {
  Table t("speed", {"run", "hours", "per_hour"});
  for (const auto& c : select(a.sel)) {
    for (const auto& p : curves::convergence_speed(c, a.window)) {
      t.add_row({c.source_run(), number(p.wall_time / 3600.0), number(p.per_hour)});
    }
  }
  emit(ctx, {t});
  return 0;
}

}  // namespace

void add_curves_commands(CLI::App& app, Context& ctx, Action& action) {
  auto* group = app.add_subcommand("curves", "Learning-curve analytics over event logs");
  group->require_subcommand(1);

  auto tts = std::make_shared<TtsArgs>();
  auto* tts_cmd = group->add_subcommand("tts", "Time (and examples) till a score is durably reached");
  add_selection(tts_cmd, tts->sel);
  tts_cmd->add_option("--threshold", tts->threshold, "Score to reach")->required();
  tts_cmd->add_option("--smooth", tts->smooth, "Trailing moving average over this many points")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  tts_cmd->add_option("--throughput", tts->throughput, "Subwords per hour, adds examples till score");
  tts_cmd->add_flag("--strict", tts->strict, "Exit 1 when some curve never reaches the threshold");
  tts_cmd->callback([&ctx, &action, tts] { action = [&ctx, tts] { return run_tts(ctx, *tts); }; });

  auto plot = std::make_shared<PlotArgs>();
  auto* plot_cmd = group->add_subcommand("plot", "Plot-ready series over hours, steps or examples");
  add_selection(plot_cmd, plot->sel);
  plot_cmd->add_option("--x", plot->axis, "X axis")->check(CLI::IsMember({"hours", "steps", "examples"}))->capture_default_str();
  plot_cmd->add_option("--batch", plot->batch, "Per-GPU batch size, needed for the examples axis");
  plot_cmd->add_option("--gpus", plot->gpus, "GPU count")->check(CLI::PositiveNumber)->capture_default_str();
  plot_cmd->callback([&ctx, &action, plot] { action = [&ctx, plot] { return run_plot(ctx, *plot); }; });

  auto speed = std::make_shared<SpeedArgs>();
  auto* speed_cmd = group->add_subcommand("speed", "Convergence speed: centered slope per hour");
  add_selection(speed_cmd, speed->sel);
  speed_cmd->add_option("--window", speed->window, "Window in seconds")->capture_default_str();
  speed_cmd->callback([&ctx, &action, speed] { action = [&ctx, speed] { return run_speed(ctx, *speed); }; });
}

}  // namespace trainlab::cli
