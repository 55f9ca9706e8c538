#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace toposq {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitPass = 0, kExitPropertyFailure = 1, kExitInputError = 2 };

/// Runs one command. `args` excludes the program name. Reports go to `out`
/// (or the --out file), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace toposq
