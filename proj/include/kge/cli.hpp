#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kge {

// Runs one subcommand. `args` excludes the program name. Returns 0 on
// success, 1 on a usage error and 2 on a data error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kge
