#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lakeoc::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes shared by all commands.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kNumericalError = 2;
inline constexpr int kInconclusive = 3;

/// Dispatch one command line (without the program name): command,
/// --config <file>, --out <dir>, --jobs <k>. Returns the process exit
/// code; diagnostics go to err, normal progress to out.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace lakeoc::cli
