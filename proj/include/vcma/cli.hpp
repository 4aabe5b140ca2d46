#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vcma {

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_solver = 2 };

/// Entry point of the vcma-sim tool; `args` excludes the program name.
/// Output files are written only after every computation has succeeded.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace vcma
