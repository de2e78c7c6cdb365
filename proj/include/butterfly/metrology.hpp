#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "butterfly/evolve.hpp"
#include "butterfly/lattice.hpp"
#include "butterfly/state.hpp"

namespace bfm {

/// One configuration of the three-stage protocol: prepare the butterfly state
/// at evolution time t, imprint a signal phase, read out <V(t)>.
struct ProtocolSpec {
  CouplingGraph graph;
  HamiltonianTerms terms;
  SitePauli v_op{0, PauliAxis::X};
  double t_ns = 0.0;
  std::string initial_bits;      // one '0'/'1' per site
  Eigen::VectorXd phi_grid;      // strictly increasing, radians
};

/// 81 points over [-1.1 pi, 1.1 pi].
Eigen::VectorXd default_phi_grid();
/// 0..200 ns in 5 ns steps.
Eigen::VectorXd default_time_grid();

ProtocolSpec make_protocol_spec(CouplingGraph graph, HamiltonianTerms terms);
void validate_spec(const ProtocolSpec& spec);

struct FringeData {
  Eigen::VectorXd phi;
  Eigen::VectorXd expectation;
  SitePauli measured_op;
};

struct SensitivityResult {
  double inv_eta = 0.0;     // |slope| / delta_m
  double slope = 0.0;       // d<M>/dphi at phi = 0
  double delta_m = 1.0;     // sqrt(1 - <M>_0^2), valid for Pauli observables
  Eigen::VectorXd cos_coeffs;  // a_0 .. a_K
  Eigen::VectorXd sin_coeffs;  // b_1 .. b_K
  double residual_norm = 0.0;
};

struct MomentSet {
  double mu = 0.0;   // <S_z>
  double m2 = 0.0;   // <S_z^2>
  double m3 = 0.0;   // <S_z^3>
};

enum class InitialMode { Fixed, Random };

struct ScalingRow {
  int n = 0;
  InitialMode mode = InitialMode::Fixed;
  double inv_eta_max = 0.0;
  double t_opt_ns = 0.0;
  double stddev = 0.0;  // over random initial-state samples; 0 in fixed mode
};

/// Butterfly state: reverse(t) . exp(i pi/4 V) . forward(t) applied to the
/// initial basis state. For zero detunings this equals
/// (|s> + i V(t)|s>)/sqrt(2).
StateVector prepare_butterfly(const ProtocolSpec& spec);
StateVector prepare_butterfly(const ProtocolSpec& spec, const Propagator& prop,
                              const Bipartition& bipartition);

/// Signal acquisition, idealized as pure phase accumulation exp(-i phi S_z).
StateVector sense(const StateVector& state, double phi);

/// <V(t)> on the sensed state: forward-propagate by t, measure v_op locally.
double readout_expectation(const StateVector& state, const ProtocolSpec& spec);
double readout_expectation(const StateVector& state, const ProtocolSpec& spec,
                           const Propagator& prop);

/// Closed-form <V>_phi for the polarized initial state |0...0>:
///   (1/2)<0|V(t)|0>
/// + (1/2)<0|V(t) e^{i phi S_z} V(t) e^{-i phi S_z} V(t)|0>
/// -  Im[e^{i phi N/2} <0|V(t) e^{-i phi S_z} V(t)|0>].
/// Cross-checked against -Im[e^{i phi N/2} chi(phi)] whenever the first two
/// terms vanish. Throws argument_error for non-polarized initial states.
double analytic_expectation(const ProtocolSpec& spec, double phi);
double analytic_expectation(const ProtocolSpec& spec, double phi, const Propagator& prop);

/// chi(phi) = sum_{S_z} e^{-i phi S_z} P(S_z).
Complex characteristic_sum(const PolarizationDistribution& dist, double phi);

MomentSet moments(const PolarizationDistribution& dist);

/// Cubic small-phase expansion
///   -phi (N/2 - mu) - phi^3 (m3/6 - N m2/4 + mu N^2/8 - N^3/48);
/// valid for |phi| < 0.5.
double taylor_expectation(const MomentSet& m, int n_sites, double phi);

FringeData run_fringe(const ProtocolSpec& spec);
FringeData run_fringe(const ProtocolSpec& spec, const Propagator& prop,
                      const Bipartition& bipartition);

/// Least-squares Fourier fit a0 + sum_k (a_k cos k phi + b_k sin k phi);
/// slope = sum_k k b_k. Throws fit_error on a rank-deficient design.
SensitivityResult fit_fringe(const FringeData& data, int n_harmonics);

struct ScalingOptions {
  double coupling_mhz = 5.0;
  PauliAxis v_axis = PauliAxis::X;   // perturbation acts on q0 in every sub-lattice
  Eigen::VectorXd t_grid_ns;         // default_time_grid() when empty
  Eigen::VectorXd phi_grid;          // default_phi_grid() when empty
  std::string initial_bits_full;     // 9 bits; per-N fixed initial = first N bits
};

/// Max-over-time inverse sensitivity per system size, on cross sub-lattices
/// grown q0..q8. Random mode draws `samples` distinct basis states per N
/// (uniform, without replacement, stream seeded by (seed, N)) and reports the
/// mean and sample standard deviation of the per-sample maxima; t_opt is the
/// first argmax of the sample-averaged curve.
std::vector<ScalingRow> scaling_sweep(const std::vector<int>& n_list, InitialMode mode,
                                      int samples, std::uint64_t seed,
                                      const ScalingOptions& options = {});

}  // namespace bfm
