#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tefcorr::cli {

inline constexpr const char* kToolName = "tefcorr";
inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
  kOk = 0,
  kIdentityFailure = 1,
  kInputError = 2,
  kBudgetExceeded = 3,
  kGateFailure = 4,
  kDivergence = 5,
};

/// Runs one command line (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tefcorr::cli
