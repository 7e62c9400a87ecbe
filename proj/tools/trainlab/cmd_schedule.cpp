#include <memory>

#include "trainlab/commands.hpp"
#include "trainlab/schedule.hpp"

namespace trainlab::cli {

namespace {

struct ScheduleArgs {
  schedule::ScheduleConfig config;
  std::int64_t gpus = 1;
  std::string rule = "keep";
};

struct NoiseArgs {
  double learning_rate = 0.20;
  double corpus = 0.0;
  std::int64_t batch = 0;
  std::int64_t gpus = 1;
};

void add_schedule_options(CLI::App* cmd, ScheduleArgs& a) {
  cmd->add_option("--lr", a.config.learning_rate, "Learning rate parameter")->capture_default_str();
  cmd->add_option("--warmup", a.config.warmup_steps, "Warmup steps")->capture_default_str();
  cmd->add_option("--scale", a.config.scale_constant, "Normalization constant")->capture_default_str();
  cmd->add_option("--gpus", a.gpus, "Scale the rate for this many GPUs")->check(CLI::PositiveNumber);
  cmd->add_option("--rule", a.rule, "GPU scaling rule: keep, linear or sqrt")
      ->check(CLI::IsMember({"keep", "keep_parameter", "linear", "sqrt"}))
      ->capture_default_str();
}

schedule::ScheduleConfig effective_config(const ScheduleArgs& a) {
  a.config.validate();
  return schedule::scale_for_gpus(a.config, {schedule::parse_scaling_rule(a.rule), a.gpus});
}

}  // namespace

void add_schedule_commands(CLI::App& app, Context& ctx, Action& action) {
  auto* group = app.add_subcommand("schedule", "Learning-rate schedule and batch-scaling calculators");
  group->require_subcommand(1);

  auto eval_args = std::make_shared<ScheduleArgs>();
  auto steps = std::make_shared<std::vector<std::int64_t>>();
  auto* eval = group->add_subcommand("eval", "Actual learning rate at the given steps");
  add_schedule_options(eval, *eval_args);
  eval->add_option("--steps", *steps, "Comma-separated steps")->delimiter(',')->required();
  eval->callback([&ctx, &action, eval_args, steps] {
    action = [&ctx, eval_args, steps] {
      const auto cfg = effective_config(*eval_args);
      Table t("schedule", {"step", "learning_rate"});
      for (auto s : *steps) {
        t.add_row({s, number(schedule::actual_lr(cfg, s))});
      }
      emit(ctx, {t});
      return 0;
    };
  });

  auto plot_args = std::make_shared<ScheduleArgs>();
  auto range = std::make_shared<std::pair<std::int64_t, std::int64_t>>(0, 100);  // max step, stride
  auto* plot = group->add_subcommand("plot", "Two-column step/rate series for plotting");
  add_schedule_options(plot, *plot_args);
  plot->add_option("--max-step", range->first, "Last step")->required()->check(CLI::PositiveNumber);
  plot->add_option("--stride", range->second, "Step increment")->check(CLI::PositiveNumber)->capture_default_str();
  plot->callback([&ctx, &action, plot_args, range] {
    action = [&ctx, plot_args, range] {
      const auto cfg = effective_config(*plot_args);
      const auto [max_step, stride] = *range;
      if (ctx.format == Format::json) {
        Table t("schedule", {"step", "learning_rate"});
        for (std::int64_t s = stride; s <= max_step; s += stride) {
          t.add_row({s, number(schedule::actual_lr(cfg, s))});
        }
        emit(ctx, {t});
        return 0;
      }
      // Commented header so gnuplot reads the columns directly.
      ctx.out << "# step\tlearning_rate\n";
      for (std::int64_t s = stride; s <= max_step; s += stride) {
        ctx.out << s << '\t' << cell_text(number(schedule::actual_lr(cfg, s))) << '\n';
      }
      return 0;
    };
  });

  auto noise = std::make_shared<NoiseArgs>();
  auto* noise_cmd = group->add_subcommand("noise", "Gradient noise scale lr * (N/B - 1)");
  noise_cmd->add_option("--lr", noise->learning_rate, "Learning rate")->capture_default_str();
  noise_cmd->add_option("--corpus", noise->corpus, "Training data size N in subwords")->required();
  noise_cmd->add_option("--batch", noise->batch, "Per-GPU batch size in subwords")->required();
  noise_cmd->add_option("--gpus", noise->gpus, "GPU count")->check(CLI::PositiveNumber)->capture_default_str();
  noise_cmd->callback([&ctx, &action, noise] {
    action = [&ctx, noise] {
      const auto eff = schedule::effective_batch_size(noise->batch, noise->gpus);
      const double g = schedule::gradient_noise_scale(noise->learning_rate, noise->corpus, static_cast<double>(eff));
      Table t("noise", {"learning_rate", "corpus_size", "effective_batch", "noise_scale"}, true);
      t.add_row({number(noise->learning_rate), number(noise->corpus), eff, number(g)});
      emit(ctx, {t});
      return 0;
    };
  });
}

}  // namespace trainlab::cli
