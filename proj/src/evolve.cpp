#include "butterfly/evolve.hpp"

#include <cmath>

#include "butterfly/errors.hpp"

namespace bfm {

Propagator::Propagator(const Eigen::MatrixXd& hamiltonian) {
  if (hamiltonian.rows() != hamiltonian.cols())
    throw argument_error("Hamiltonian must be square");
  // TODO: lattice Hamiltonians commute with total S_z, so this factorization
  // could run per excitation sector; profile the noisy sweeps before adding it.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
  if (solver.info() != Eigen::Success)
    throw consistency_error("eigendecomposition failed to converge");
  eigenvectors_ = solver.eigenvectors();
  eigenvalues_ = solver.eigenvalues();

  const Eigen::MatrixXd reconstructed =
      eigenvectors_ * eigenvalues_.asDiagonal() * eigenvectors_.transpose();
  const double scale = std::max(hamiltonian.norm(), 1.0);
  if ((reconstructed - hamiltonian).norm() > 1e-10 * scale)
    throw consistency_error("spectral factorization does not reproduce H");
}

Eigen::VectorXcd Propagator::apply(const Eigen::VectorXcd& amps, double t_ns) const {
  if (amps.size() != dim()) throw argument_error("state dimension does not match propagator");
  if (!std::isfinite(t_ns)) throw argument_error("evolution time must be finite");
  // Real/imaginary parts separately: the basis change is a real matrix.
  Eigen::VectorXd re = eigenvectors_.transpose() * amps.real();
  Eigen::VectorXd im = eigenvectors_.transpose() * amps.imag();
  Eigen::VectorXcd rotated(dim());
  for (Eigen::Index k = 0; k < dim(); ++k)
    rotated[k] = std::polar(1.0, -eigenvalues_[k] * t_ns) * Complex(re[k], im[k]);
  Eigen::VectorXcd out(dim());
  out.real() = eigenvectors_ * rotated.real();
  out.imag() = eigenvectors_ * rotated.imag();
  return out;
}

StateVector propagate(const StateVector& state, const Propagator& prop, double t_ns) {
  return StateVector{state.n_sites, prop.apply(state.amps, t_ns)};
}

StateVector reverse_evolve(const StateVector& state, const Propagator& prop, double t_ns,
                           const Bipartition& bipartition) {
  if (t_ns < 0.0) throw argument_error("reverse_evolve expects t >= 0");
  StateVector s = apply_sublattice_z(state, bipartition.color_a);
  s = propagate(s, prop, t_ns);
  return apply_sublattice_z(s, bipartition.color_a);
}

}  // namespace bfm
