#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace monotone::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kSolverError = 3 };

/// Runs the command line `args` (without the program name). Progress goes to
/// `out`; failures are reported on `err` as one JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace monotone::cli
