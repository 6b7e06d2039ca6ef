#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace reluexact {

/// Runs the command-line tool with `args` (without the program name).
/// Artifacts go to the file named by --out, or to `out` when none is given;
/// reports go to `out` too, or to `err` when the artifact took `out`.
/// Returns the process exit code: 0 success, 2 invalid input, 3 budget
/// exceeded, 4 failed check or internal error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace reluexact
