#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bdpz::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kNotErgodic = 2,
    kTruncation = 3,
    kSolver = 4,
};

/// Runs one command line (args[0] is the program name). Progress and
/// errors go to `out` / `err`; artifacts go to the --out directory.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bdpz::cli
