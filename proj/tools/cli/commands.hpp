#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace omegares::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kError = 1, kRefusal = 2 };

// args excludes the program name; everything goes to out/err so tests can run it in-process
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace omegares::cli
