#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coha::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// exit codes: CI must be able to tell a finding from a bug
inline constexpr int kExitOk = 0;
inline constexpr int kExitPrecondition = 2;   // bad parameters / malformed input
inline constexpr int kExitExpectation = 3;    // a mathematical expectation failed
inline constexpr int kExitInfeasible = 4;     // size bounds rejected the request

// Dispatches one command line (without argv[0]); writes the JSON (or CSV)
// record to `out` and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coha::cli
