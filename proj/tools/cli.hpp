#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace logmoment_cli {

/// Exit codes of the command-line front end.
enum ExitCode {
  kExitPass = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitNumerical = 3,
};

/// Runs one command line; args excludes the program name. Results go to
/// `out` (or the --out file), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace logmoment_cli
