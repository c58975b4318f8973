#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace grouptrack {

enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitConfig = 3, kExitRuntime = 4 };

/// Runs the command line interface; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace grouptrack
