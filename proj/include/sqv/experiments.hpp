#pragma once

// Experiment runner. Each experiment writes its artifacts — CSV data, a JSON
// report (residuals, bounds, seeds, verdicts), a human-readable report.txt
// and the canonical config — into cfg.output_dir and nowhere else. For a
// fixed config the files are byte-identical across reruns and worker counts;
// every file embeds the config hash and the software version.
//
// Return value is the process exit status: 0 when every emitted verdict is
// PASS, 2 when any is FAIL. Internal errors propagate as exceptions.

#include "sqv/config.hpp"

namespace sqv {

int run_experiment(const ExperimentConfig& cfg);

}  // namespace sqv
