#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crycheck::cli {

enum ExitStatus : int { kClean = 0, kViolations = 1, kError = 2 };

/// Runs one command line (args[0] is the program name) and returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crycheck::cli
