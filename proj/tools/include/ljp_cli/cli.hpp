#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ljp::cli {

/// Exit codes of the `ljp` tool.
enum ExitCode : int {
  kOk = 0,
  kFailed = 1,  // a run finished but did not pass (gradcheck)
  kUsage = 2,   // bad flags
  kError = 3,   // a stage raised an error; the diagnostic names it
};

/// Parses `args` (without the program name) and runs one subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ljp::cli
