#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fdml::cli {

// Runs one `fdml <command> ...` invocation. Returns the process exit code;
// errors are printed to `err` as a single "error[E_CODE]: message" line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fdml::cli
