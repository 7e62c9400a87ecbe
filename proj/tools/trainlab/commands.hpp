#pragma once

#include <functional>

#include <CLI11.hpp>

#include "trainlab/report.hpp"

namespace trainlab::cli {

/// Set by the selected subcommand's parse callback; run after parsing.
using Action = std::function<int()>;

void add_schedule_commands(CLI::App& app, Context& ctx, Action& action);
void add_batching_commands(CLI::App& app, Context& ctx, Action& action);
void add_bleu_command(CLI::App& app, Context& ctx, Action& action);
void add_curves_commands(CLI::App& app, Context& ctx, Action& action);
void add_ckpt_commands(CLI::App& app, Context& ctx, Action& action);
void add_vocab_commands(CLI::App& app, Context& ctx, Action& action);

}  // namespace trainlab::cli
