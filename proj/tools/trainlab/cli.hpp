#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trainlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation. `args` excludes the program name. Data goes to
/// `out`, diagnostics to `err`; `in` backs commands that read stdin.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in);

}  // namespace trainlab::cli
