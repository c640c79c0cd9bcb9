#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace divproj::cli {

/// Runs one command line (args exclude the program name). Returns the exit
/// code: 0 success, 1 numerical failure, 2 input or usage error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace divproj::cli
