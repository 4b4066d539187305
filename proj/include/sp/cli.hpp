#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sp {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitEmpty = 2 };

/**
 * Entry point of the `spcm` tool. `args` excludes the program name.
 *
 * Subcommands: align, learn, reason, score. Diagnostics go to `err`,
 * results to `out`.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sp
