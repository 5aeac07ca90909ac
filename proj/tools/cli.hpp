#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace for2for::cli {

/// Runs one command line (without the program name) and returns the exit code:
/// 0 ok, 1 usage, 2 data, 3 numeric. On failure the first line written to
/// `err` is `error: <code>: <message>`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace for2for::cli
