#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qpki::cli {

// Runs one command-line invocation. `args` excludes the program name.
// Returns the process exit code: 0 on success, 1 when a verification check
// or an honest-run simulation fails, 2 on usage errors or I/O trouble.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace qpki::cli
