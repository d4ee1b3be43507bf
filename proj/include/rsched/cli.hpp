#pragma once

#include <iosfwd>

namespace rsched {

// Exit codes of the command-line front end.
enum ExitCode : int { exit_ok = 0, exit_usage = 2, exit_io = 3, exit_infeasible = 4 };

// `rsched generate|run|sweep ...`; writes human-readable progress to `out`
// and diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rsched
