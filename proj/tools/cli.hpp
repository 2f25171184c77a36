#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace randcomp::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes: 0 success, 1 valid negative answer (infeasible, attempts
/// exhausted), 2 invalid input or resource cap.
enum ExitCode : int { kOk = 0, kNegative = 1, kInvalid = 2 };

/// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace randcomp::cli
