#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spcg::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIo = 2,
  kExitNumerical = 3,  // breakdown or no convergence
};

/// Runs one `spcg` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spcg::cli
