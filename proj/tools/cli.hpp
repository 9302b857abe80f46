#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wfoeil::cli {

// Runs one command line; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wfoeil::cli
