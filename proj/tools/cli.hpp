#pragma once

#include <ostream>

namespace graspctl::cli {

// Exit codes
inline constexpr int kOk = 0;
inline constexpr int kRuntimeFault = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kNoClosure = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace graspctl::cli
