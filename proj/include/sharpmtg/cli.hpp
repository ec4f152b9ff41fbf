#ifndef SHARPMTG_CLI_HPP
#define SHARPMTG_CLI_HPP

#include <ostream>

namespace sharpmtg {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitUsage = 2,
  kExitNumerical = 3,
};

/// Entry point for `sharpmtg <command> [flags]`; commands are constant, table,
/// verify and simulate. Normal output goes to `out` unless --out names a file.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sharpmtg

#endif
