#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bcpar::cli {

enum ExitCode : int {
  kOk = 0,
  kError = 1,
  kMalformed = 2,
  kUnsupportedVersion = 3,
  kNoCandidate = 4,
  kVerifyFailed = 5,
  kBackendUnavailable = 6,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bcpar::cli
