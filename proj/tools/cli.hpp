#pragma once

#include <iosfwd>

namespace hyperid::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable that replaces the output directory of every subcommand.
inline constexpr const char* kOutputDirEnv = "HYPERID_OUTPUT_DIR";

/// Entry point of the hyperid tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hyperid::cli
