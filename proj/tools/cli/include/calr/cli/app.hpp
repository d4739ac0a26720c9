#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace calr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `calr` tool. `args` excludes the program name.
/// Returns 0 on success, 1 on a runtime failure, 2 on a usage error; usage
/// errors are detected before any output file is created.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace calr::cli
