#pragma once

// Subcommands of the `resent` front end. Each returns the process exit code:
// 0 success, 1 configuration error, 2 numeric failure, 3 invariance
// spot-check failure of a declared set, 4 property violation.

#include <iosfwd>

#include "resent/config.hpp"

namespace resent {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumeric = 2, kExitInvariance = 3, kExitProps = 4 };

int cmd_bound(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, std::ostream& out);
int cmd_oracle(const RunConfig& config, std::ostream& out);
int cmd_lanford(const RunConfig& config, std::ostream& out);
int cmd_props(const RunConfig& config, std::ostream& out);

/// Validates the config, dispatches on config.command and maps exceptions to
/// exit codes, printing the diagnostics to `err`.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace resent
