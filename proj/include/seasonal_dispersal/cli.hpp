#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sdisp {

/// Process exit codes of the command line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNumerical = 2,
  kExitHypothesis = 3,
};

/// Runs one subcommand (simulate, eigen, periodic, classify, sweep). args
/// excludes the program name. Diagnostics go to err, summaries to out.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// argv-style entry point used by the executable.
int dispatch(int argc, const char* const* argv);

}  // namespace sdisp
