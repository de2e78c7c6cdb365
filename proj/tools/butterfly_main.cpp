#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "butterfly/runner.hpp"
#include "butterfly/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Butterfly-metrology simulator: time-reversed lattice dynamics, Loschmidt "
               "echoes, OTOC scrambling diagnostics, sensitivity extraction, noise sweeps, "
               "and calibration fits"};
  app.set_version_flag("--version", std::string("butterfly ") + bfm::kVersion);

  std::string experiment;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool list = false;
  bool validate_only = false;

  app.add_option("experiment", experiment, "Experiment name (see --list)");
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_dir, "Output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides config)");
  app.add_flag("--list", list, "List available experiments and exit");
  app.add_flag("--validate", validate_only, "Validate the configuration and exit");

  CLI11_PARSE(app, argc, argv);
  seed_set = seed_opt->count() > 0;

  if (list) {
    for (const auto& name : bfm::experiment_names()) std::cout << name << '\n';
    return 0;
  }

  bfm::ExperimentConfig config;
  try {
    if (!config_path.empty()) config = bfm::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(bfm::ExitCode::InvalidConfig);
  }
  if (seed_set) config.seed = seed;
  if (!out_dir.empty()) config.output_directory = out_dir;

  if (validate_only) {
    const auto violations = bfm::validate_config(config);
    if (violations.empty()) {
      std::cout << "configuration valid\n";
      return 0;
    }
    for (const auto& v : violations) std::cout << "violation: " << v << '\n';
    return static_cast<int>(bfm::ExitCode::InvalidConfig);
  }

  if (experiment.empty()) {
    std::cerr << "error: no experiment given; try --list\n";
    return static_cast<int>(bfm::ExitCode::UnknownExperiment);
  }
  return static_cast<int>(bfm::run_experiment(experiment, config, std::cerr));
}
