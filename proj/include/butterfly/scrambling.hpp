#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "butterfly/evolve.hpp"
#include "butterfly/lattice.hpp"
#include "butterfly/state.hpp"

namespace bfm {

/// Forward-then-reversed evolution results on a time grid. `ideal` is the
/// disorder-free run; mean/stddev summarize the disorder ensemble (equal to
/// the ideal run when no disorder was requested). `p_return_mean` is the
/// probability that the probe qubit is still excited, the directly measured
/// observable.
struct EchoCurve {
  Eigen::VectorXd times_ns;
  Eigen::VectorXd ideal;
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  Eigen::VectorXd p_return_mean;
  int realizations = 0;
};

struct DecomposedOtoc {
  double c = 0.0;
  double c_plus = 0.0;
  double c_minus = 0.0;
};

/// OTOC decay data in the decomposed convention: sigma_x on i_site (static),
/// sigma_z on j_site (time-evolved). Every point satisfies
/// C = 2 + C_- - C_+ within 1e-9.
struct OtocCurve {
  Eigen::VectorXd times_ns;
  Eigen::VectorXcd f_values;
  Eigen::VectorXd c_values;
  Eigen::VectorXd c_plus;
  Eigen::VectorXd c_minus;
};

OtocCurve otoc_curve(const Propagator& prop, const Eigen::VectorXd& t_grid_ns, int i_site,
                     int j_site, const StateVector& initial);

/// Excites `probe_site` (rest in |0>), evolves forward then Z-sandwich
/// reversed, and records the probability of recovering the full initial basis
/// state at each grid time. With `detuning_sigma_mhz`, each realization draws
/// one static Gaussian detuning per site (std sigma_f in MHz) and the curve
/// reports the ensemble mean and sample standard deviation; per-realization
/// streams derive from (seed, realization index).
EchoCurve loschmidt_echo(const CouplingGraph& graph, const HamiltonianTerms& terms,
                         const Eigen::VectorXd& t_grid_ns, int probe_site,
                         std::optional<double> detuning_sigma_mhz = std::nullopt,
                         int realizations = 1, std::uint64_t seed = 0);

/// F(t) = <psi| W(t) V W(t) V |psi> with W(t) = U^dag(t) W U(t), evaluated by
/// applying the operator string to state copies (W(t) is never formed as a
/// matrix).
Complex otoc_f(const Propagator& prop, double t_ns, SitePauli w, SitePauli v,
               const StateVector& initial);
Complex otoc_f(const CouplingGraph& graph, const HamiltonianTerms& terms, double t_ns,
               SitePauli w, SitePauli v, const StateVector& initial);

/// Squared commutator C(t) = 2 - 2 Re F(t).
double otoc_c(const Propagator& prop, double t_ns, SitePauli w, SitePauli v,
              const StateVector& initial);
double otoc_c(const CouplingGraph& graph, const HamiltonianTerms& terms, double t_ns,
              SitePauli w, SitePauli v, const StateVector& initial);

/// Measurable decomposition with pseudo-projectors (1 +- sigma_x^i)/sqrt(2):
///   C_+- = <psi| P_+- sigma_z^j(t) sigma_x^i sigma_z^j(t) P_+- |psi>,
/// checked against the independently computed C = 2 + C_- - C_+ (throws
/// consistency_error beyond 1e-9).
DecomposedOtoc otoc_c_decomposed(const Propagator& prop, double t_ns, int i_site, int j_site,
                                 const StateVector& initial);
DecomposedOtoc otoc_c_decomposed(const CouplingGraph& graph, const HamiltonianTerms& terms,
                                 double t_ns, int i_site, int j_site, const StateVector& initial);

/// C_i(t) = <s| sigma_z^i V(t) sigma_z^i V(t) |s> for every site i; requires a
/// computational basis state.
Eigen::VectorXd qubit_resolved_otoc(const Propagator& prop, double t_ns, SitePauli v,
                                    const StateVector& initial);
Eigen::VectorXd qubit_resolved_otoc(const CouplingGraph& graph, const HamiltonianTerms& terms,
                                    double t_ns, SitePauli v, const StateVector& initial);

/// 1/eta = (1/2) sum_i (1 - C_i): the inverse sensitivity implied by the
/// qubit-resolved OTOCs.
double otoc_sensitivity_oracle(const Eigen::VectorXd& c_values);

}  // namespace bfm
