#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace bfm {

using Complex = std::complex<double>;

enum class PauliAxis { X, Y, Z, I };

/// A single-site Pauli operator.
struct SitePauli {
  int site = 0;
  PauliAxis axis = PauliAxis::X;
};

SitePauli sigma_x(int site);
SitePauli sigma_y(int site);
SitePauli sigma_z(int site);

/// Pure state of n_sites two-level systems.
///
/// Basis conventions (frozen; CSV regressions depend on them):
///   * |0> is the +1 eigenstate of sigma_z, so S_z(|0...0>) = +n/2.
///   * Site 0 is the most significant bit of the basis index: the bit of
///     site s in index i is (i >> (n_sites - 1 - s)) & 1.
struct StateVector {
  static constexpr int kMaxSites = 12;

  int n_sites = 0;
  Eigen::VectorXcd amps;

  Eigen::Index dim() const { return amps.size(); }
  double norm() const { return amps.norm(); }
};

/// Discrete distribution of the total polarization S_z = (1/2) sum_i sigma_i^z.
/// weights[k] is the probability of S_z = k - n_sites/2, k = 0..n_sites.
struct PolarizationDistribution {
  int n_sites = 0;
  Eigen::VectorXd weights;

  int two_s_z(int k) const { return 2 * k - n_sites; }
  double s_z(int k) const { return 0.5 * two_s_z(k); }
};

std::uint32_t site_bit_mask(int n_sites, int site);

/// S_z eigenvalue of a computational basis index.
double s_z_of_index(std::uint32_t index, int n_sites);

/// Basis state from a bit string ("10" puts site 0 in |1>, site 1 in |0>).
StateVector basis_state(int n_sites, std::string_view bits);
StateVector basis_state_from_index(int n_sites, std::uint32_t index);

/// P|psi> for a single-site Pauli P (Identity allowed).
StateVector apply_pauli(const StateVector& state, SitePauli op);

/// exp(i theta P)|psi> = (cos theta) |psi> + i (sin theta) P|psi>.
/// theta = pi/4 realizes the balanced perturbation (I + iP)/sqrt(2).
StateVector apply_site_rotation(const StateVector& state, SitePauli op, double theta);

/// Multiplies each basis amplitude by (-1)^(number of |1> bits among sites).
StateVector apply_sublattice_z(const StateVector& state, std::span<const int> sites);

/// <psi|P|psi>; throws consistency_error if the imaginary residue exceeds 1e-9.
double expectation(const StateVector& state, SitePauli op);

PolarizationDistribution polarization_distribution(const StateVector& state);

/// exp(-i phi S_z)|psi>.
StateVector global_z_phase(const StateVector& state, double phi);

/// <a|b>.
Complex overlap(const StateVector& a, const StateVector& b);

/// Probability that `site` is in |1>.
double excited_population(const StateVector& state, int site);

}  // namespace bfm
