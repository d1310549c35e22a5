#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rhobound/config.hpp"

namespace rhobound {

// Shared process exit codes: 0 success, 2 malformed configuration or unknown
// command, 3 certificate infeasible for the requested instance, 4 numeric
// breakdown.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitInfeasible = 3,
  kExitNumeric = 4,
};

// Runs one named command against a configuration, writing CSV/JSON artifacts
// under the config's out_dir and diagnostics to `log`.  Every command is
// deterministic given its configuration (Monte Carlo included, through the
// master seeds), independent of the `threads` setting.
int run_command(const std::string& name, const ExperimentConfig& cfg,
                std::ostream& log);

std::vector<std::string> command_names();

}  // namespace rhobound
