#pragma once

#include <ostream>

namespace sbp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitCheckFailed = 4;

/// Parses argv, runs one subcommand and writes its document to `out` (or the
/// --out file). Diagnostics and --check verdicts go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sbp::cli
