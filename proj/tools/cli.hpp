#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sbg::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kNonConvergence = 3,
};

/// Runs the `sbg` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sbg::cli
