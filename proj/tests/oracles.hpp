#pragma once

// Test-only oracles, kept independent of the library's computation paths:
// operators are assembled by Kronecker products and exponentiated as full
// dense complex matrices.

#include <Eigen/Dense>
#include <complex>

#include "butterfly/lattice.hpp"
#include "butterfly/rng.hpp"
#include "butterfly/state.hpp"

namespace oracle {

using bfm::Complex;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

inline MatrixXcd pauli_2x2(bfm::PauliAxis axis) {
  MatrixXcd m(2, 2);
  switch (axis) {
    case bfm::PauliAxis::X: m << 0, 1, 1, 0; break;
    case bfm::PauliAxis::Y: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case bfm::PauliAxis::Z: m << 1, 0, 0, -1; break;
    case bfm::PauliAxis::I: m.setIdentity(); break;
  }
  return m;
}

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Dense single-site Pauli on n sites (site 0 is the leftmost tensor factor,
/// matching the most-significant-bit convention).
inline MatrixXcd pauli_matrix(int n_sites, bfm::SitePauli op) {
  MatrixXcd out = MatrixXcd::Identity(1, 1);
  for (int s = 0; s < n_sites; ++s)
    out = kron(out, pauli_2x2(s == op.site ? op.axis : bfm::PauliAxis::I));
  return out;
}

/// Hamiltonian assembled purely from Kronecker products.
inline MatrixXcd hamiltonian_matrix(const bfm::CouplingGraph& g,
                                    const bfm::HamiltonianTerms& t) {
  const Eigen::Index dim = Eigen::Index(1) << g.n_sites;
  MatrixXcd h = MatrixXcd::Zero(dim, dim);
  for (int s = 0; s < g.n_sites; ++s)
    h += 0.5 * t.detunings[s] * pauli_matrix(g.n_sites, bfm::sigma_z(s));
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto [a, b] = g.edges[e];
    const MatrixXcd xa = pauli_matrix(g.n_sites, bfm::sigma_x(a));
    const MatrixXcd ya = pauli_matrix(g.n_sites, bfm::sigma_y(a));
    const MatrixXcd xb = pauli_matrix(g.n_sites, bfm::sigma_x(b));
    const MatrixXcd yb = pauli_matrix(g.n_sites, bfm::sigma_y(b));
    // s+ s- + s- s+ = (XX + YY)/2
    h += 0.5 * t.couplings[e] * (xa * xb + ya * yb);
  }
  return h;
}

/// Dense e^{-iHt} through a complex Hermitian eigensolver.
inline MatrixXcd unitary_matrix(const MatrixXcd& h, double t_ns) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  const Eigen::VectorXd w = es.eigenvalues();
  VectorXcd phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) phases[k] = std::polar(1.0, -w[k] * t_ns);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline bfm::StateVector random_state(int n_sites, std::uint64_t seed) {
  bfm::GaussianStream stream(seed);
  bfm::StateVector s{n_sites, VectorXcd(Eigen::Index(1) << n_sites)};
  for (Eigen::Index i = 0; i < s.dim(); ++i) s.amps[i] = Complex(stream.next(), stream.next());
  s.amps /= s.amps.norm();
  return s;
}

}  // namespace oracle
