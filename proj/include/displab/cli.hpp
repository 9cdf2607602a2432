#pragma once

#include <string>
#include <vector>

namespace displab::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kAssertionFailed = 2;
inline constexpr int kBlowUp = 3;
inline constexpr int kUsage = 64;
inline constexpr int kConfigUnreadable = 66;

/// Runs one subcommand; args excludes the program name.
int dispatch(const std::vector<std::string>& args);

}  // namespace displab::cli
