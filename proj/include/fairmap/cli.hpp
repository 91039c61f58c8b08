#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fairmap::cli {

// Stable process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kInputError = 2,     // parse or validation failure
  kNetworkError = 3,   // embeddings endpoint failure
  kInternalError = 4,  // dimension or consistency failure
};

// Runs one command line (without the program name). Normal output goes to
// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fairmap::cli
