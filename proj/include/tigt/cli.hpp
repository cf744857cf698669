#pragma once

#include <iosfwd>

namespace tigt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // verification failure or runtime error
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

// Entry point of the `tigt` command. Errors are reported as one line on
// `err`, "tigt: error[<kind>]: <message>", and mapped to the exit codes above.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tigt
