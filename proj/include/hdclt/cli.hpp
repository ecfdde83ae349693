#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace hdclt::cli {

/// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitDegenerate = 1;
inline constexpr int kExitUsage = 2;

/**
 * Runs one subcommand. args excludes the program name.
 *
 * JSON reports go to --out when given and to out otherwise; the one-line
 * summary and all diagnostics go to err.
 */
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

}  // namespace hdclt::cli
