#pragma once

#include <iosfwd>

#include "mktsym/cli/config.hpp"

namespace mktsym::cli {

enum ExitCode : int { kSuccess = 0, kRuntimeFailure = 1, kUsageFailure = 2 };

// Runs the chosen subcommand, writing its files (and run-config.txt) under
// config.out_dir and a short summary to `log`.
void execute(const ExperimentConfig& config, std::ostream& log);

// Whole command-line entry point; maps errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mktsym::cli
