#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cgrav::cli {

/// Runs one command line (args excludes the program name). Returns the process exit code:
/// 0 on success, 1 on a domain or I/O error, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cgrav::cli
