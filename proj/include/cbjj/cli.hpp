#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cbjj {

inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitComputation = 4;

/// Name of the environment variable holding the default output root.
inline constexpr const char* kOutputRootEnv = "CBJJ_OUT";

/// Dispatches a command line (args[0] is the program name) and returns the exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cbjj
