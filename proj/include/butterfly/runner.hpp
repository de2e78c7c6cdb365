#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "butterfly/config.hpp"

namespace bfm {

enum class ExitCode : int {
  Ok = 0,
  UnknownExperiment = 2,
  InvalidConfig = 3,
  IoError = 4,
  InternalError = 5,
};

const std::vector<std::string>& experiment_names();

/// Runs one named experiment: validates the config, writes the experiment's
/// CSV outputs (plus optional SVG charts) into the output directory, then
/// writes manifest.json atomically. Diagnostics go to `diag`.
ExitCode run_experiment(const std::string& experiment, const ExperimentConfig& config,
                        std::ostream& diag);

}  // namespace bfm
