#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fairalloc::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kValidationFailure = 2;
inline constexpr int kCapabilityFailure = 3;

// Runs one command line (args excludes the program name). Output that is not
// redirected to a file goes to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fairalloc::cli
