#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace randsplit {

/// Exit codes of the command line tool.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfigError = 2, kExitSolverError = 3 };

/// Subcommands run | convergence | check | version. `args` excludes the
/// program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace randsplit
