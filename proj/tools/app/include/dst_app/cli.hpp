#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dst::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitProcessing = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `dst` tool. `args` excludes the program name.
/// Returns 0 on success, 2 on a usage error and 1 when processing fails.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dst::app
