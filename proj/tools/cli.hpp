#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace selfsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `selfsim` tool. Results go to `out`, diagnostics to
/// `err`. Output files are written only after a command fully succeeds.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace selfsim::cli
