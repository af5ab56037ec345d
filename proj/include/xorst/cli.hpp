#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xorst {

enum ExitCode : int {
  kExitOk = 0,
  kExitBoundViolated = 1,
  kExitValidation = 2,
  kExitStrictWarning = 3,
  kExitPrecondition = 4,
};

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xorst
