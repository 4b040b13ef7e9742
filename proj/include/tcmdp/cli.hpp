#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tcmdp {

/// Runs the command line `args` (without the program name). Returns the exit
/// code: 0 success, 1 runtime failure or property violations, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tcmdp
