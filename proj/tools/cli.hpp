#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace evmap::cli {

/// Runs the command line given as argv-style strings (args[0] is the
/// program name). Returns the process exit code: 0 success, 1 planner
/// unreachable, 2 configuration or input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evmap::cli
