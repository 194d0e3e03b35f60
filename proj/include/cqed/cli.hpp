#pragma once
// Command-line front end. Exit codes are part of the interface:
//   0 success, 2 parse/usage error, 3 validation failure, 4 runtime error.

#include <iosfwd>
#include <string>
#include <vector>

namespace cqed::cli {

enum ExitCode : int {
  kSuccess = 0,
  kParseError = 2,
  kValidationFailure = 3,
  kRuntimeError = 4,
};

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cqed::cli
