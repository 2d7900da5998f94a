#pragma once

#include <string>
#include <vector>

namespace thermoarena::cli {

enum ExitCode { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

/// Parses argv (argv[0] is the program name) and runs one subcommand.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace thermoarena::cli
