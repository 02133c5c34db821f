#pragma once

#include <string>
#include <vector>

namespace rlscape {

// Runs one toolkit command. args excludes the program name. Returns the
// process exit code: 0 on success, nonzero on failure after printing a
// machine-readable JSON error record to stderr.
int run_cli(const std::vector<std::string>& args);

}  // namespace rlscape
