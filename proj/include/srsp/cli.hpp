#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace srsp::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kSuccess = 0,
  kValidationError = 1,
  kNotConverged = 2,
  kCheckFailed = 3,
};

/// Parses `args` (without the program name) and runs the selected
/// subcommand. JSON goes to `out` unless redirected to a file, summaries
/// and errors go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const char* version();

}  // namespace srsp::cli
