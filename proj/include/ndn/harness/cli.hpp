#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ndn::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;  // bad flags, unreadable or invalid input
inline constexpr int kExitRuntime = 2;  // failure while running (checkpoint, training, inference)

/// Runs the `ndn` command line; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ndn::harness
