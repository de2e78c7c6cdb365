#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "butterfly/lattice.hpp"
#include "butterfly/metrology.hpp"
#include "butterfly/noise.hpp"
#include "butterfly/state.hpp"
#include "butterfly/units.hpp"

namespace bfm {

/// Everything an experiment run needs, loaded from one JSON file. Unknown
/// keys are rejected; units follow the field names (MHz, ns, rad).
struct ExperimentConfig {
  std::uint64_t seed = 20250810;

  // lattice
  std::string lattice_preset = "cross9";
  int n_active = 0;  // 0 = full preset

  // hamiltonian
  double coupling_mhz = 5.0;
  std::vector<double> detunings_mhz;  // empty = all zero

  // protocol
  int v_site = 0;
  PauliAxis v_axis = PauliAxis::X;
  std::string initial_bits;  // empty = |0...0>, or "random", or explicit bits
  double phi_min = -1.1 * kPi;
  double phi_max = 1.1 * kPi;
  int phi_points = 81;
  double t_max_ns = 200.0;
  double t_step_ns = 5.0;
  int probe_site = 0;
  int otoc_x_site = 0;
  int otoc_z_site = 1;
  double otoc_t_max_ns = 500.0;
  std::vector<int> scaling_n_list = {5, 6, 7, 8, 9};
  int scaling_samples = 9;

  // noise (NoiseConfig::seed is filled from the top-level seed at run time)
  NoiseConfig noise;

  // calibration inputs
  std::string calibration_input_csv;
  double nominal_sensitivity_mhz = 10.0;
  double curvature_ghz_per_phi0sq = 26.0;

  // output
  std::string output_directory = "out";
  bool emit_svg = false;
};

ExperimentConfig load_config(const std::filesystem::path& json_path);
ExperimentConfig parse_config(const std::string& json_text);

/// Canonical JSON serialization of the resolved config (sorted keys); the
/// manifest hashes these bytes.
std::string canonical_config_json(const ExperimentConfig& config);

/// Full validation; returns every violation found (empty means valid).
/// Never partially executes an experiment.
std::vector<std::string> validate_config(const ExperimentConfig& config);

// Resolution helpers shared by the runner and tests.
CouplingGraph resolved_graph(const ExperimentConfig& config);
HamiltonianTerms resolved_terms(const ExperimentConfig& config, const CouplingGraph& graph);
std::string resolved_initial_bits(const ExperimentConfig& config, int n_sites);
Eigen::VectorXd resolved_phi_grid(const ExperimentConfig& config);
Eigen::VectorXd resolved_time_grid(const ExperimentConfig& config);
ProtocolSpec resolved_spec(const ExperimentConfig& config);

}  // namespace bfm
