#pragma once

#include <Eigen/Dense>

#include "butterfly/lattice.hpp"
#include "butterfly/state.hpp"

namespace bfm {

/// Exact propagator for a real-symmetric Hamiltonian, held as its spectral
/// factorization H = V diag(w) V^T. Computed once, then any e^{-iHt}|psi>
/// costs four real mat-vecs. Immutable after construction; safe to share
/// across threads.
class Propagator {
 public:
  /// Factorizes H; throws consistency_error if the reconstruction
  /// V diag(w) V^T drifts from H beyond 1e-10 relative Frobenius norm.
  explicit Propagator(const Eigen::MatrixXd& hamiltonian);

  Propagator(const CouplingGraph& graph, const HamiltonianTerms& terms)
      : Propagator(build_hamiltonian(graph, terms)) {}

  Eigen::Index dim() const { return eigenvalues_.size(); }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }

  /// e^{-iHt} applied to a raw amplitude vector.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& amps, double t_ns) const;

 private:
  Eigen::MatrixXd eigenvectors_;
  Eigen::VectorXd eigenvalues_;
};

/// e^{-iHt}|psi>; t may be negative (direct inverse evolution).
StateVector propagate(const StateVector& state, const Propagator& prop, double t_ns);

/// Z-sandwich reversal: Z_a e^{-iHt} Z_a with Z_a the color_a sublattice
/// string. Equals e^{+iHt} exactly when the detunings vanish on a bipartite
/// hopping graph.
StateVector reverse_evolve(const StateVector& state, const Propagator& prop, double t_ns,
                           const Bipartition& bipartition);

}  // namespace bfm
