#pragma once

#include <iosfwd>

namespace pouw::cli {

/// Exit statuses shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // verification, satisfaction or other domain failure
inline constexpr int kExitUsage = 2;    // bad flags, bad config, unknown experiment

/// Parses argv and runs one command. Normal output goes to `out`,
/// diagnostics to `err`. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pouw::cli
