#include <doctest.h>

#include <cmath>

#include "butterfly/errors.hpp"
#include "butterfly/evolve.hpp"
#include "butterfly/units.hpp"
#include "oracles.hpp"

using namespace bfm;

TEST_SUITE("evolve") {

TEST_CASE("propagate basics") {
  const CouplingGraph g = chain_lattice(2);
  const Propagator prop(g, zero_detuning_terms(g, 5.0));
  const StateVector psi = oracle::random_state(2, 1);
  SUBCASE("t = 0 is the identity") {
    CHECK((propagate(psi, prop, 0.0).amps - psi.amps).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("non-finite time is rejected") {
    CHECK_THROWS_AS(propagate(psi, prop, std::nan("")), argument_error);
  }
  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(propagate(oracle::random_state(3, 2), prop, 1.0), argument_error);
  }
}

TEST_CASE("two-site Rabi exchange") {
  // J/2pi = 5 MHz: the |10> -> |10> return probability is cos^2(J t).
  const CouplingGraph g = chain_lattice(2);
  const Propagator prop(g, zero_detuning_terms(g, 5.0));
  const StateVector start = basis_state(2, "10");
  const StateVector at50 = propagate(start, prop, 50.0);
  CHECK(std::norm(at50.amps[2]) == doctest::Approx(0.0).epsilon(1e-12));
  const StateVector at25 = propagate(start, prop, 25.0);
  CHECK(std::norm(at25.amps[2]) == doctest::Approx(0.5));
}

TEST_CASE("propagate matches the dense-matrix oracle") {
  const CouplingGraph g = chain_lattice(3);
  Eigen::VectorXd det(3);
  det << 1.5, -0.5, 2.0;
  const HamiltonianTerms t = make_terms(g, 5.0, det);
  const Propagator prop(g, t);
  const StateVector psi = oracle::random_state(3, 9);
  for (double time : {13.0, 120.0, -42.0}) {
    const oracle::MatrixXcd u = oracle::unitary_matrix(oracle::hamiltonian_matrix(g, t), time);
    CHECK((propagate(psi, prop, time).amps - u * psi.amps).norm() < 1e-10);
  }
}

TEST_CASE("group law and unitarity") {
  const CouplingGraph g = cross_lattice_9();
  const Propagator prop(g, zero_detuning_terms(g));
  const StateVector psi = oracle::random_state(9, 31);
  SUBCASE("U(t1) U(t2) = U(t1 + t2)") {
    const StateVector split = propagate(propagate(psi, prop, 170.0), prop, -320.0);
    const StateVector direct = propagate(psi, prop, -150.0);
    CHECK((split.amps - direct.amps).norm() < 1e-9);
  }
  SUBCASE("norm drift stays tiny over 100 chained calls") {
    StateVector s = psi;
    for (int k = 0; k < 100; ++k) s = propagate(s, prop, 7.0);
    CHECK(std::abs(s.norm() - 1.0) < 1e-8);
  }
  SUBCASE("excitation sectors keep their weight") {
    const StateVector evolved = propagate(psi, prop, 87.0);
    const Eigen::VectorXd before = polarization_distribution(psi).weights;
    const Eigen::VectorXd after = polarization_distribution(evolved).weights;
    CHECK((before - after).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("Z-sandwich reversal") {
  const CouplingGraph g = cross_lattice_9();
  const Bipartition bp = two_coloring(g);
  SUBCASE("zero detuning: echo recovers the state") {
    const Propagator prop(g, zero_detuning_terms(g));
    for (double t : {10.0, 50.0, 200.0}) {
      const StateVector psi = oracle::random_state(9, 50 + static_cast<std::uint64_t>(t));
      const StateVector echoed = reverse_evolve(propagate(psi, prop, t), prop, t, bp);
      CHECK((echoed.amps - psi.amps).norm() <= 1e-9);
    }
  }
  SUBCASE("reversal identity as a matrix, dense oracle") {
    const CouplingGraph chain = chain_lattice(3);
    const HamiltonianTerms t = zero_detuning_terms(chain, 5.0);
    const Bipartition bp3 = two_coloring(chain);
    const oracle::MatrixXcd u = oracle::unitary_matrix(oracle::hamiltonian_matrix(chain, t), 73.0);
    oracle::MatrixXcd sz = oracle::MatrixXcd::Identity(8, 8);
    for (int site : bp3.color_a) sz = sz * oracle::pauli_matrix(3, sigma_z(site));
    const oracle::MatrixXcd round = sz * u * sz * u;
    CHECK((round - oracle::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("detuning disorder leaves the echo imperfect") {
    Eigen::VectorXd det = Eigen::VectorXd::Zero(9);
    det << 2.1, -1.7, 0.4, 3.0, -2.2, 1.1, 0.6, -0.9, 1.9;
    const Propagator prop(g, make_terms(g, 5.0, det));
    const StateVector psi = basis_state(9, "100000000");
    const StateVector echoed = reverse_evolve(propagate(psi, prop, 200.0), prop, 200.0, bp);
    CHECK(std::abs(overlap(psi, echoed)) < 0.999);
  }
  SUBCASE("single site with no edges is trivially reversed") {
    const CouplingGraph single = chain_lattice(1);
    const Propagator prop(single, zero_detuning_terms(single));
    const Bipartition bp1 = two_coloring(single);
    const StateVector psi = oracle::random_state(1, 3);
    const StateVector echoed = reverse_evolve(propagate(psi, prop, 44.0), prop, 44.0, bp1);
    CHECK((echoed.amps - psi.amps).norm() < 1e-12);
  }
  SUBCASE("negative reversal time is rejected") {
    const Propagator prop(g, zero_detuning_terms(g));
    CHECK_THROWS_AS(reverse_evolve(oracle::random_state(9, 1), prop, -1.0, bp), argument_error);
  }
}

}  // TEST_SUITE
