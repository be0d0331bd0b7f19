#pragma once

#include <string>
#include <vector>

namespace qpfk::cli {

enum ExitCode : int { kSuccess = 0, kValidation = 1, kNumerical = 2, kIo = 3 };

// Runs the command line front end; argv[0] is the program name.
int run(const std::vector<std::string>& args);

}  // namespace qpfk::cli
