#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kpp::cli {

/// Exit codes: a missing plan is an answer, not a failure.
inline constexpr int kExitFeasible = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;

/// Runs one command line (without the program name). Reports go to `out`,
/// diagnostics and config notices to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kpp::cli
