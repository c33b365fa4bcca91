// Command-line driver: configuration loading and validation, run-directory
// management, and the discretize / solve / verify / report commands.
#pragma once

namespace reot {

// Executes one CLI invocation and returns the process exit code:
//   0 success
//   2 configuration error (bad flags, malformed or unknown config keys)
//   3 infeasible problem or a failed feasibility re-check
//   4 missing artifact (verify/report without the required files)
//   5 solver failure or a failed optimality re-check
int run_cli(int argc, const char* const* argv);

}  // namespace reot
