#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace natr {

// Exit codes are part of the command-line contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitBudget = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitUsage = 64;

struct CliEnvironment {
  bool color = false;
};

// args excludes the program name.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err,
            const CliEnvironment& env = {});

}  // namespace natr
