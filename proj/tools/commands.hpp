#pragma once

// The reichlab subcommands. Each writes its reports under config.out_dir and
// returns a process exit status.

#include <iosfwd>

#include "run_config.hpp"

namespace reichlab::cli {

enum ExitCode : int {
    kPass = 0,
    kContractFailure = 1,
    kConfigError = 2,
    kIoError = 3,
    kNotCertified = 4,
};

// Invariance, mass identity, reproducing property, kernel mass decay and
// truncation certificates on the configured group. Writes kernel_report.json.
int cmd_kernel_check(const RunConfig& config, std::ostream& log);

// Builds every window atom, audits decay certificates and the partition sum.
// Writes atoms.csv and partition_report.json (and lattice.json for punctured windows).
int cmd_partition_build(const RunConfig& config, std::ostream& log);

// Reads atoms.csv and runs the three-condition audit. Writes report.json,
// condition2.csv and condition3.csv.
int cmd_reich_audit(const RunConfig& config, std::ostream& log);

// Runs a command, mapping escaped exceptions to exit codes.
int run_guarded(int (*command)(const RunConfig&, std::ostream&), const RunConfig& config,
                std::ostream& log);

}  // namespace reichlab::cli
