#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qnn_forge::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,        // replay verdict failed, or an unexpected error
  kConfigError = 2,
  kNumericFailure = 3,
  kCorruptTrace = 4,
};

/// Runs the command line `args` (without the program name), writing normal
/// output to `out` and diagnostics to `err`. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qnn_forge::cli
