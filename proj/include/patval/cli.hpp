#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace patval {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

/// Runs one command line (without the program name). Subcommands: train,
/// validate, update, augment, bench, explain.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace patval
