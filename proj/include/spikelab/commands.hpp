#pragma once

#include "spikelab/config.hpp"
#include "spikelab/pipeline.hpp"
#include "spikelab/report.hpp"

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

namespace spikelab {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitNonConvergence = 3,
  kExitAssumption = 4,
  kExitMerged = 5,
};

/// Maps an exception to its exit code: ConfigError and GridError -> 2,
/// PeakMergerError -> 5, other SolverError -> 3, AssumptionError -> 4,
/// anything else -> 1.
int exit_code_for(const std::exception& e);

/// Subcommand names in the order the CLI lists them.
const std::vector<std::string>& command_names();

/// Runs one subcommand, writing tables under config.outputs.directory and
/// progress to `log`. Errors are reported on `log` and turned into exit codes.
int run_command(const std::string& name, const RunConfig& config, std::ostream& log);

/// Scalar states for the model block, warm-started from and saved to the
/// checkpoint directory keyed by the scalar config section.
ScalarStates load_states(const RunConfig& config);

// Subcommands. Each returns an exit code for outcomes that are reported
// rather than thrown (a merged peak pair, a missing root).
int cmd_groundstate(const RunConfig& config, Ledger& ledger, std::ostream& log);
int cmd_corrections(const RunConfig& config, Ledger& ledger, std::ostream& log);
int cmd_errornorms(const RunConfig& config, Ledger& ledger, std::ostream& log);
int cmd_coercivity(const RunConfig& config, Ledger& ledger, std::ostream& log);
int cmd_reduced(const RunConfig& config, Ledger& ledger, std::ostream& log);
int cmd_asymptotics(const RunConfig& config, Ledger& ledger, std::ostream& log);
int cmd_full_solve(const RunConfig& config, Ledger& ledger, std::ostream& log);

}  // namespace spikelab
