#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace preyclass {

inline constexpr const char* kSeedEnv = "PREYCLASS_SEED";
inline constexpr unsigned long long kDefaultSeed = 42;

/// Runs the command-line interface. `args` excludes the program name.
/// Returns 0 on success, 1 on a library error (one-line diagnostic on `err`),
/// 2 on a usage error (message and usage text on `err`).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace preyclass
