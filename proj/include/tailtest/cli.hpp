#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tailtest {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // domain, parse or I/O error
inline constexpr int kExitUsage = 2;
inline constexpr int kExitHeavy = 3;  // only with --exit-verdict
inline constexpr int kExitLight = 4;  // only with --exit-verdict

// Entry point shared by the tool and the tests. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tailtest
