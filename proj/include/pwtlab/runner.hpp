#pragma once

#include <string>

#include "pwtlab/config.hpp"

namespace pwt {

// Dispatches a parsed config, writing every artifact under cfg.out. Returns
// the process exit status: 0 on success, 4 when a validate run found an
// invalid map. Domain errors propagate as pwt::Error; the CLI turns them
// into a machine-readable error record and a nonzero exit.
int run_experiment(const ExperimentConfig& cfg);

// Exit status for an error class.
int exit_code_for(Err code);

// Resolves the worker count: explicit config value, else PWT_LAB_THREADS,
// else 1.
int resolve_threads(int configured);

}  // namespace pwt
