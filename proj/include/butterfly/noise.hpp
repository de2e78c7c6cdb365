#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "butterfly/lattice.hpp"
#include "butterfly/metrology.hpp"
#include "butterfly/state.hpp"

namespace bfm {

/// Quasi-static Gaussian noise: piecewise-constant offsets resampled every
/// tau_noise_ns, plus one static phase offset on the sensed signal.
struct NoiseConfig {
  double sigma_freq_mhz = 0.0;      // per-site frequency noise, sigma_w/2pi
  double sigma_coupling_mhz = 0.0;  // per-edge coupling noise, sigma_J/2pi
  double sigma_phase_rad = 0.0;     // signal phase noise
  double tau_noise_ns = 10.0;
  int realizations = 1;
  std::uint64_t seed = 0;
  /// Reverse stage replays the forward trace instead of a fresh one; used by
  /// the reversal-asymmetry checks.
  bool shared_traces = false;
};

void validate_noise_config(const NoiseConfig& config);

/// One sampled disorder trace. Draw order per stream (frozen for
/// reproducibility): for each segment, n_sites detuning offsets then n_edges
/// coupling offsets; one phase offset last. Offsets are stored angular
/// (rad/ns); the stream is seeded by derive_stream_seed(seed, index).
struct NoiseRealization {
  double tau_ns = 10.0;
  Eigen::MatrixXd detuning_offsets;  // n_segments x n_sites
  Eigen::MatrixXd coupling_offsets;  // n_segments x n_edges
  double phase_offset = 0.0;

  int n_segments() const { return static_cast<int>(detuning_offsets.rows()); }
  double covered_ns() const { return n_segments() * tau_ns; }
};

NoiseRealization sample_realization(const NoiseConfig& config, const CouplingGraph& graph,
                                    double t_total_ns, int index);

/// Piecewise-exact evolution: each tau segment gets its perturbed Hamiltonian
/// and an exact spectral propagation (final partial segment by its actual
/// length). Segments play in wall-clock order.
StateVector noisy_propagate(const StateVector& state, const CouplingGraph& graph,
                            const HamiltonianTerms& terms, const NoiseRealization& realization,
                            double t_ns);

/// Same, but the segments covering [0, t] play last-to-first: the mirror
/// schedule a time-reversed stage follows. With shared traces this makes the
/// Z-sandwich cancel coupling noise exactly; frequency noise survives it.
StateVector noisy_propagate_mirrored(const StateVector& state, const CouplingGraph& graph,
                                     const HamiltonianTerms& terms,
                                     const NoiseRealization& realization, double t_ns);

struct RobustnessCurve {
  Eigen::VectorXd t_ns;
  Eigen::VectorXd inv_eta;   // fit of the realization-averaged fringe
  Eigen::VectorXd std_err;   // bootstrap standard error per time
  double inv_eta_max = 0.0;
  double t_opt_ns = 0.0;
  double max_std_err = 0.0;  // bootstrap standard error of the maximum
  int realizations = 0;
};

/// Butterfly protocol under noise: preparation uses noisy propagation in both
/// the forward and the Z-sandwiched reverse stage (independent traces unless
/// shared_traces), the sensed phase per realization is phi + eta_phi, readout
/// stays ideal. Fringes are averaged over realizations in index order, then
/// fitted; errors come from a seeded bootstrap over realizations.
RobustnessCurve noisy_butterfly(const ProtocolSpec& base, const Eigen::VectorXd& t_grid_ns,
                                const NoiseConfig& config, int bootstrap_resamples = 100);

}  // namespace bfm
