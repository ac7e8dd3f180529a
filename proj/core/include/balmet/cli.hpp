#pragma once

#include "balmet/config.hpp"

namespace balmet {

/// Runs one experiment end to end: parse the bundle, execute the subcommand,
/// write the JSON report (and CSV history for balance runs).
/// Exit codes: 0 the experiment ran and its assertion holds, 1 the assertion
/// failed, 2 usage or configuration error.
int run_experiment(const ExperimentConfig& config);

}  // namespace balmet
