#include "butterfly/state.hpp"

#include <bit>
#include <cmath>

#include "butterfly/errors.hpp"

namespace bfm {

namespace {

void check_sites(int n_sites) {
  if (n_sites < 1 || n_sites > StateVector::kMaxSites)
    throw argument_error("n_sites must be in [1, " + std::to_string(StateVector::kMaxSites) +
                         "], got " + std::to_string(n_sites));
}

void check_site(const StateVector& state, int site) {
  if (site < 0 || site >= state.n_sites)
    throw argument_error("site " + std::to_string(site) + " out of range for " +
                         std::to_string(state.n_sites) + " sites");
}

}  // namespace

SitePauli sigma_x(int site) { return {site, PauliAxis::X}; }
SitePauli sigma_y(int site) { return {site, PauliAxis::Y}; }
SitePauli sigma_z(int site) { return {site, PauliAxis::Z}; }

std::uint32_t site_bit_mask(int n_sites, int site) {
  return 1u << (n_sites - 1 - site);
}

double s_z_of_index(std::uint32_t index, int n_sites) {
  return 0.5 * (n_sites - 2 * std::popcount(index));
}

StateVector basis_state_from_index(int n_sites, std::uint32_t index) {
  check_sites(n_sites);
  const Eigen::Index dim = Eigen::Index(1) << n_sites;
  if (index >= static_cast<std::uint32_t>(dim))
    throw argument_error("basis index out of range");
  StateVector s{n_sites, Eigen::VectorXcd::Zero(dim)};
  s.amps[index] = 1.0;
  return s;
}

StateVector basis_state(int n_sites, std::string_view bits) {
  check_sites(n_sites);
  if (static_cast<int>(bits.size()) != n_sites)
    throw argument_error("bit string length " + std::to_string(bits.size()) +
                         " does not match n_sites " + std::to_string(n_sites));
  std::uint32_t index = 0;
  for (int site = 0; site < n_sites; ++site) {
    const char c = bits[site];
    if (c != '0' && c != '1') throw argument_error("bit string must contain only '0'/'1'");
    if (c == '1') index |= site_bit_mask(n_sites, site);
  }
  return basis_state_from_index(n_sites, index);
}

StateVector apply_pauli(const StateVector& state, SitePauli op) {
  if (op.axis == PauliAxis::I) return state;
  check_site(state, op.site);
  const std::uint32_t mask = site_bit_mask(state.n_sites, op.site);
  const Eigen::Index dim = state.dim();
  StateVector out{state.n_sites, Eigen::VectorXcd(dim)};
  switch (op.axis) {
    case PauliAxis::X:
      for (Eigen::Index i = 0; i < dim; ++i)
        out.amps[i] = state.amps[static_cast<Eigen::Index>(i) ^ mask];
      break;
    case PauliAxis::Y:
      // sigma_y|0> = i|1>, sigma_y|1> = -i|0>
      for (Eigen::Index i = 0; i < dim; ++i) {
        const bool excited = (static_cast<std::uint32_t>(i) & mask) != 0;
        out.amps[i] = (excited ? Complex(0.0, 1.0) : Complex(0.0, -1.0)) *
                      state.amps[static_cast<Eigen::Index>(i) ^ mask];
      }
      break;
    case PauliAxis::Z:
      for (Eigen::Index i = 0; i < dim; ++i) {
        const bool excited = (static_cast<std::uint32_t>(i) & mask) != 0;
        out.amps[i] = excited ? -state.amps[i] : state.amps[i];
      }
      break;
    case PauliAxis::I:
      break;
  }
  return out;
}

StateVector apply_site_rotation(const StateVector& state, SitePauli op, double theta) {
  if (op.axis == PauliAxis::I) throw argument_error("rotation axis must not be Identity");
  check_site(state, op.site);
  const StateVector p = apply_pauli(state, op);
  StateVector out{state.n_sites, std::cos(theta) * state.amps +
                                     Complex(0.0, std::sin(theta)) * p.amps};
  return out;
}

StateVector apply_sublattice_z(const StateVector& state, std::span<const int> sites) {
  std::uint32_t mask = 0;
  for (int site : sites) {
    check_site(state, site);
    mask |= site_bit_mask(state.n_sites, site);
  }
  const Eigen::Index dim = state.dim();
  StateVector out{state.n_sites, Eigen::VectorXcd(dim)};
  for (Eigen::Index i = 0; i < dim; ++i) {
    const bool odd = std::popcount(static_cast<std::uint32_t>(i) & mask) & 1;
    out.amps[i] = odd ? -state.amps[i] : state.amps[i];
  }
  return out;
}

double expectation(const StateVector& state, SitePauli op) {
  const StateVector p = apply_pauli(state, op);
  const Complex value = state.amps.dot(p.amps);
  if (std::abs(value.imag()) > 1e-9)
    throw consistency_error("Pauli expectation has imaginary residue " +
                            std::to_string(value.imag()));
  return value.real();
}

PolarizationDistribution polarization_distribution(const StateVector& state) {
  const int n = state.n_sites;
  PolarizationDistribution dist{n, Eigen::VectorXd::Zero(n + 1)};
  const Eigen::Index dim = state.dim();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const int excitations = std::popcount(static_cast<std::uint32_t>(i));
    // S_z = n/2 - excitations, stored at k = S_z + n/2 = n - excitations.
    dist.weights[n - excitations] += std::norm(state.amps[i]);
  }
  for (int k = 0; k <= n; ++k)
    if (dist.weights[k] < 0.0) dist.weights[k] = 0.0;
  return dist;
}

StateVector global_z_phase(const StateVector& state, double phi) {
  const Eigen::Index dim = state.dim();
  StateVector out{state.n_sites, Eigen::VectorXcd(dim)};
  // Phase depends only on the excitation count; precompute the n+1 values.
  Eigen::VectorXcd phases(state.n_sites + 1);
  for (int exc = 0; exc <= state.n_sites; ++exc) {
    const double sz = 0.5 * state.n_sites - exc;
    phases[exc] = std::polar(1.0, -phi * sz);
  }
  for (Eigen::Index i = 0; i < dim; ++i)
    out.amps[i] = phases[std::popcount(static_cast<std::uint32_t>(i))] * state.amps[i];
  return out;
}

Complex overlap(const StateVector& a, const StateVector& b) {
  if (a.n_sites != b.n_sites) throw argument_error("overlap: state sizes differ");
  return a.amps.dot(b.amps);
}

double excited_population(const StateVector& state, int site) {
  check_site(state, site);
  const std::uint32_t mask = site_bit_mask(state.n_sites, site);
  double p = 0.0;
  for (Eigen::Index i = 0; i < state.dim(); ++i)
    if (static_cast<std::uint32_t>(i) & mask) p += std::norm(state.amps[i]);
  return p;
}

}  // namespace bfm
