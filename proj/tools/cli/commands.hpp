#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace subavg::cli {

/// Exit codes of the subavg tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitMaxIter = 2,
  kExitCutLocus = 3,
  kExitLineSearch = 4,
};

/// Runs the tool on `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace subavg::cli
