#include "trainlab/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "trainlab/commands.hpp"
#include "trainlab/version.hpp"

namespace trainlab::cli {

namespace {

// First argument that is neither a flag nor the value of --format.
std::optional<std::string> first_positional(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--format") {
      ++i;
    } else if (!args[i].starts_with("-")) {
      return args[i];
    }
  }
  return std::nullopt;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
  Context ctx{out, err, in};

  CLI::App app{"Training-run analytics: schedules, batching, BLEU, curves, checkpoints, subwords.", "trainlab"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(version()));

  std::string format = "tsv";
  if (const char* env = std::getenv("TRAINLAB_FORMAT"); env != nullptr && *env != '\0') {
    format = env;
  }
  app.add_option("--format", format, "Output format (default tsv, or $TRAINLAB_FORMAT)")
      ->check(CLI::IsMember({"tsv", "json"}));
  int verbose = 0;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "More diagnostics on stderr (repeatable)");
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");

  Action action;
  add_schedule_commands(app, ctx, action);
  add_batching_commands(app, ctx, action);
  add_bleu_command(app, ctx, action);
  add_curves_commands(app, ctx, action);
  add_ckpt_commands(app, ctx, action);
  add_vocab_commands(app, ctx, action);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (const auto name = first_positional(args); name && app.get_subcommand_no_throw(*name) == nullptr) {
      err << "error: unknown subcommand '" << *name << "'\n\n" << app.help();
      return kExitUsage;
    }
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    ctx.format = parse_format(format);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  ctx.verbosity = quiet ? 0 : 1 + verbose;

  if (!action) {
    err << app.help();
    return kExitUsage;
  }
  try {
    return action();
  } catch (const StrictFailure&) {
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
}

}  // namespace trainlab::cli
