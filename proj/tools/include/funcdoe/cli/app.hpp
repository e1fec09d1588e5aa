#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace funcdoe::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitNumeric = 3,
  kExitIo = 4,
};

/// Default directory for outputs when no explicit path is given.
inline constexpr const char* kOutputDirEnv = "FUNCDOE_OUTPUT_DIR";

/// Runs the command line `args` (without the program name) and returns the
/// exit code. Messages go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace funcdoe::cli
