#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace motionfit::cli {

// Runs the command line `args` (without the program name). Normal output goes
// to `out`, warnings and errors to `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace motionfit::cli
