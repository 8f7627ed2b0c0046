#pragma once

#include <iosfwd>

namespace catkerr {

/// Exit codes of the command-line runner.
enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
};

/// Parses argv, runs one experiment and writes its artifacts.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace catkerr
