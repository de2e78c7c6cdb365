#include <doctest.h>

#include <cmath>

#include "butterfly/errors.hpp"
#include "butterfly/rng.hpp"
#include "butterfly/scrambling.hpp"
#include "butterfly/units.hpp"
#include "oracles.hpp"

using namespace bfm;

namespace {

Complex dense_otoc_f(const CouplingGraph& g, const HamiltonianTerms& t, double time,
                     SitePauli w, SitePauli v, const StateVector& psi) {
  const oracle::MatrixXcd u = oracle::unitary_matrix(oracle::hamiltonian_matrix(g, t), time);
  const oracle::MatrixXcd wt = u.adjoint() * oracle::pauli_matrix(g.n_sites, w) * u;
  const oracle::MatrixXcd vm = oracle::pauli_matrix(g.n_sites, v);
  return psi.amps.dot(wt * vm * wt * vm * psi.amps);
}

}  // namespace

TEST_SUITE("scrambling") {

TEST_CASE("ideal Loschmidt echo stays at unit fidelity") {
  const CouplingGraph g = cross_lattice_9();
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(5, 0.0, 200.0);
  const EchoCurve curve = loschmidt_echo(g, zero_detuning_terms(g), grid, 0);
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    CHECK(curve.ideal[k] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(curve.p_return_mean[k] == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(curve.stddev.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-site echo is trivial") {
  const CouplingGraph g = chain_lattice(1);
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(3, 0.0, 100.0);
  const EchoCurve curve = loschmidt_echo(g, zero_detuning_terms(g), grid, 0);
  CHECK(curve.ideal.minCoeff() == doctest::Approx(1.0));
}

TEST_CASE("disordered echo decays and is reproducible") {
  const CouplingGraph g = sub_lattice(cross_lattice_9(), 5);
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(9, 0.0, 200.0);
  const EchoCurve a = loschmidt_echo(g, zero_detuning_terms(g), grid, 0, 3.0, 40, 77);
  CHECK(a.mean[grid.size() - 1] < 0.99);
  CHECK(a.stddev.maxCoeff() > 0.0);
  const EchoCurve b = loschmidt_echo(g, zero_detuning_terms(g), grid, 0, 3.0, 40, 77);
  CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() == 0.0);  // schedule independence
  CHECK_THROWS_AS(loschmidt_echo(g, zero_detuning_terms(g), grid, 9), argument_error);
}

TEST_CASE("otoc_f at t = 0") {
  const CouplingGraph g = cross_lattice_9();
  const HamiltonianTerms t = zero_detuning_terms(g);
  const Propagator prop(g, t);
  const StateVector zero = basis_state(9, std::string(9, '0'));
  SUBCASE("disjoint Paulis commute") {
    CHECK(std::abs(otoc_f(prop, 0.0, sigma_x(5), sigma_z(0), zero) - Complex(1.0)) < 1e-12);
  }
  SUBCASE("anticommuting pair on one site gives -1") {
    CHECK(otoc_f(prop, 0.0, sigma_x(0), sigma_z(0), zero).real() == doctest::Approx(-1.0));
  }
}

TEST_CASE("otoc_f matches the dense-matrix oracle") {
  const CouplingGraph g = sub_lattice(cross_lattice_9(), 5);
  Eigen::VectorXd det(5);
  det << 0.3, -0.8, 1.2, 0.0, -0.4;
  const HamiltonianTerms t = make_terms(g, 5.0, det);
  const Propagator prop(g, t);
  const StateVector psi = oracle::random_state(5, 1234);
  for (double time : {60.0, 240.0, 500.0}) {
    const Complex lib = otoc_f(prop, time, sigma_x(0), sigma_z(1), psi);
    const Complex dense = dense_otoc_f(g, t, time, sigma_x(0), sigma_z(1), psi);
    CHECK(std::abs(lib - dense) < 1e-9);
  }
}

TEST_CASE("squared commutator") {
  const CouplingGraph g = cross_lattice_9();
  const Propagator prop(g, zero_detuning_terms(g));
  const StateVector zero = basis_state(9, std::string(9, '0'));
  SUBCASE("disjoint sites at t = 0 vanish") {
    CHECK(otoc_c(prop, 0.0, sigma_x(0), sigma_z(1), zero) == doctest::Approx(0.0));
  }
  SUBCASE("same-site anticommuting pair saturates at 4") {
    CHECK(otoc_c(prop, 0.0, sigma_x(0), sigma_z(0), zero) == doctest::Approx(4.0));
  }
  SUBCASE("long-time value matches the dense oracle") {
    const CouplingGraph g5 = sub_lattice(cross_lattice_9(), 5);
    const HamiltonianTerms t5 = zero_detuning_terms(g5);
    const Propagator prop5(g5, t5);
    const StateVector psi = basis_state(5, "10010");
    const double lib = otoc_c(prop5, 500.0, sigma_x(0), sigma_z(1), psi);
    const double dense = 2.0 - 2.0 * dense_otoc_f(g5, t5, 500.0, sigma_x(0), sigma_z(1), psi).real();
    CHECK(lib == doctest::Approx(dense).epsilon(1e-9));
  }
}

TEST_CASE("decomposition identity C = 2 + C_minus - C_plus") {
  const CouplingGraph g = sub_lattice(cross_lattice_9(), 6);
  const Propagator prop(g, zero_detuning_terms(g));
  SUBCASE("t = 0, polarized state, disjoint sites") {
    const DecomposedOtoc d = otoc_c_decomposed(prop, 0.0, 0, 1,
                                               basis_state(6, std::string(6, '0')));
    CHECK(d.c == doctest::Approx(0.0));
    CHECK(2.0 + d.c_minus - d.c_plus == doctest::Approx(0.0));
  }
  SUBCASE("random states and times") {
    for (std::uint64_t trial = 0; trial < 25; ++trial) {
      const double time = 20.0 * (trial % 6);
      const StateVector psi = oracle::random_state(6, 7000 + trial);
      const DecomposedOtoc d = otoc_c_decomposed(prop, time, 0, 1, psi);
      CHECK(std::abs(d.c - (2.0 + d.c_minus - d.c_plus)) <= 1e-9);
    }
  }
  SUBCASE("same site for both operators is allowed") {
    const DecomposedOtoc d = otoc_c_decomposed(prop, 35.0, 2, 2, oracle::random_state(6, 4));
    CHECK(std::abs(d.c - (2.0 + d.c_minus - d.c_plus)) <= 1e-9);
  }
  SUBCASE("wrongly normalized pseudo-projectors break the identity") {
    // Recompute C_+- with 1/2 instead of 1/sqrt(2): the difference term halves.
    const StateVector psi = oracle::random_state(6, 21);
    const double time = 80.0;
    auto branch = [&](double sign) {
      StateVector projected{psi.n_sites,
                            (psi.amps + sign * apply_pauli(psi, sigma_x(0)).amps) / 2.0};
      StateVector s = propagate(projected, prop, time);
      s = apply_pauli(s, sigma_z(1));
      s = propagate(s, prop, -time);
      s = apply_pauli(s, sigma_x(0));
      s = propagate(s, prop, time);
      s = apply_pauli(s, sigma_z(1));
      s = propagate(s, prop, -time);
      return overlap(projected, s).real();
    };
    const double c_plus_bad = branch(+1.0), c_minus_bad = branch(-1.0);
    const DecomposedOtoc good = otoc_c_decomposed(prop, time, 0, 1, psi);
    const double mismatch = std::abs(good.c - (2.0 + c_minus_bad - c_plus_bad));
    CHECK(mismatch > 1e-3);  // identity visibly broken
    CHECK(good.c_plus == doctest::Approx(2.0 * c_plus_bad));
    CHECK(good.c_minus == doctest::Approx(2.0 * c_minus_bad));
  }
}

TEST_CASE("qubit-resolved OTOC") {
  const CouplingGraph g = cross_lattice_9();
  const HamiltonianTerms t = zero_detuning_terms(g);
  const Propagator prop(g, t);
  const StateVector zero = basis_state(9, std::string(9, '0'));
  SUBCASE("t = 0, v = sigma_x(q0)") {
    const Eigen::VectorXd c = qubit_resolved_otoc(prop, 0.0, sigma_x(0), zero);
    CHECK(c[0] == doctest::Approx(-1.0));
    for (int i = 1; i < 9; ++i) CHECK(c[i] == doctest::Approx(1.0));
  }
  SUBCASE("t = 0, v = sigma_z(q0): everything commutes") {
    const Eigen::VectorXd c = qubit_resolved_otoc(prop, 0.0, sigma_z(0), zero);
    for (int i = 0; i < 9; ++i) CHECK(c[i] == doctest::Approx(1.0));
  }
  SUBCASE("matches the dense oracle at finite time") {
    const CouplingGraph g5 = sub_lattice(cross_lattice_9(), 5);
    const HamiltonianTerms t5 = zero_detuning_terms(g5);
    const Propagator prop5(g5, t5);
    const StateVector s = basis_state(5, "01100");
    const double time = 140.0;
    const Eigen::VectorXd c = qubit_resolved_otoc(prop5, time, sigma_x(0), s);
    const oracle::MatrixXcd u =
        oracle::unitary_matrix(oracle::hamiltonian_matrix(g5, t5), time);
    const oracle::MatrixXcd vt = u.adjoint() * oracle::pauli_matrix(5, sigma_x(0)) * u;
    for (int i = 0; i < 5; ++i) {
      const oracle::MatrixXcd zi = oracle::pauli_matrix(5, sigma_z(i));
      const Complex dense = s.amps.dot(zi * vt * zi * vt * s.amps);
      CHECK(std::abs(c[i] - dense.real()) < 1e-9);
      CHECK(std::abs(dense.imag()) < 1e-9);
    }
  }
  SUBCASE("rejects superposition inputs") {
    CHECK_THROWS_AS(qubit_resolved_otoc(prop, 10.0, sigma_x(0), oracle::random_state(9, 8)),
                    argument_error);
  }
}

TEST_CASE("otoc sensitivity oracle") {
  CHECK(otoc_sensitivity_oracle(Eigen::VectorXd::Ones(9)) == doctest::Approx(0.0));
  CHECK(otoc_sensitivity_oracle(Eigen::VectorXd::Zero(9)) == doctest::Approx(4.5));
  Eigen::VectorXd c = Eigen::VectorXd::Ones(9);
  c[0] = -1.0;  // the t = 0 qubit-resolved values for v = sigma_x(q0)
  CHECK(otoc_sensitivity_oracle(c) == doctest::Approx(1.0));
  SUBCASE("monotone: lowering any C_i raises the output") {
    Eigen::VectorXd base = Eigen::VectorXd::Constant(9, 0.3);
    const double before = otoc_sensitivity_oracle(base);
    for (int i = 0; i < 9; ++i) {
      Eigen::VectorXd lowered = base;
      lowered[i] -= 0.2;
      CHECK(otoc_sensitivity_oracle(lowered) > before);
    }
  }
  SUBCASE("rejects out-of-range values") {
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(3);
    bad[1] = 1.5;
    CHECK_THROWS_AS(otoc_sensitivity_oracle(bad), argument_error);
  }
}

}  // TEST_SUITE
