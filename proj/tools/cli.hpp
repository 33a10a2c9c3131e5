#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hypertree::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kValidationError = 2,
  kTrainingError = 3,
};

/// Runs the `hypertree` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hypertree::cli
