#include "butterfly/scrambling.hpp"

#include <cmath>

#include "butterfly/errors.hpp"
#include "butterfly/parallel.hpp"
#include "butterfly/rng.hpp"
#include "butterfly/units.hpp"

namespace bfm {

namespace {

StateVector heisenberg_apply(const Propagator& prop, double t_ns, SitePauli op,
                             const StateVector& state) {
  // W(t)|psi> = U^dag(t) W U(t)|psi>
  StateVector s = propagate(state, prop, t_ns);
  s = apply_pauli(s, op);
  return propagate(s, prop, -t_ns);
}

double clip_probability(double p) {
  if (p < -1e-9 || p > 1.0 + 1e-9)
    throw consistency_error("probability escaped [0, 1]: " + std::to_string(p));
  return std::min(std::max(p, 0.0), 1.0);
}

bool is_basis_state(const StateVector& state) {
  int nonzero = 0;
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    if (std::norm(state.amps[i]) > 1e-24) {
      if (++nonzero > 1) return false;
      if (std::abs(std::norm(state.amps[i]) - 1.0) > 1e-10) return false;
    }
  }
  return nonzero == 1;
}

}  // namespace

EchoCurve loschmidt_echo(const CouplingGraph& graph, const HamiltonianTerms& terms,
                         const Eigen::VectorXd& t_grid_ns, int probe_site,
                         std::optional<double> detuning_sigma_mhz, int realizations,
                         std::uint64_t seed) {
  if (probe_site < 0 || probe_site >= graph.n_sites)
    throw argument_error("probe site out of range");
  if (detuning_sigma_mhz && realizations < 1)
    throw argument_error("disordered echo needs at least one realization");

  const Bipartition bipartition = two_coloring(graph);
  std::string bits(graph.n_sites, '0');
  bits[probe_site] = '1';
  const StateVector initial = basis_state(graph.n_sites, bits);
  const std::uint32_t init_index = [&] {
    for (Eigen::Index i = 0; i < initial.dim(); ++i)
      if (std::norm(initial.amps[i]) > 0.5) return static_cast<std::uint32_t>(i);
    return 0u;
  }();

  const Eigen::Index n_t = t_grid_ns.size();
  auto run = [&](const HamiltonianTerms& run_terms, Eigen::VectorXd& fid,
                 Eigen::VectorXd& p_ret) {
    const Propagator prop(graph, run_terms);
    for (Eigen::Index k = 0; k < n_t; ++k) {
      StateVector s = propagate(initial, prop, t_grid_ns[k]);
      s = reverse_evolve(s, prop, t_grid_ns[k], bipartition);
      fid[k] = clip_probability(std::norm(s.amps[init_index]));
      p_ret[k] = clip_probability(excited_population(s, probe_site));
    }
  };

  EchoCurve curve;
  curve.times_ns = t_grid_ns;
  curve.ideal.resize(n_t);
  Eigen::VectorXd ideal_p(n_t);
  run(terms, curve.ideal, ideal_p);

  if (!detuning_sigma_mhz) {
    curve.mean = curve.ideal;
    curve.stddev = Eigen::VectorXd::Zero(n_t);
    curve.p_return_mean = ideal_p;
    curve.realizations = 1;
    return curve;
  }

  const double sigma_omega = omega_from_mhz(*detuning_sigma_mhz);
  Eigen::MatrixXd fids(realizations, n_t), p_rets(realizations, n_t);
  parallel_for(static_cast<std::size_t>(realizations), [&](std::size_t r) {
    GaussianStream gauss(derive_stream_seed(seed, r));
    HamiltonianTerms disordered = terms;
    for (int site = 0; site < graph.n_sites; ++site)
      disordered.detunings[site] += gauss.next(sigma_omega);
    Eigen::VectorXd fid(n_t), p_ret(n_t);
    run(disordered, fid, p_ret);
    fids.row(static_cast<Eigen::Index>(r)) = fid;
    p_rets.row(static_cast<Eigen::Index>(r)) = p_ret;
  });

  curve.mean = fids.colwise().mean();
  curve.p_return_mean = p_rets.colwise().mean();
  curve.stddev = Eigen::VectorXd::Zero(n_t);
  if (realizations > 1) {
    for (Eigen::Index k = 0; k < n_t; ++k) {
      const double m = curve.mean[k];
      curve.stddev[k] =
          std::sqrt((fids.col(k).array() - m).square().sum() / (realizations - 1));
    }
  }
  curve.realizations = realizations;
  return curve;
}

Complex otoc_f(const Propagator& prop, double t_ns, SitePauli w, SitePauli v,
               const StateVector& initial) {
  StateVector s = apply_pauli(initial, v);
  s = heisenberg_apply(prop, t_ns, w, s);
  s = apply_pauli(s, v);
  s = heisenberg_apply(prop, t_ns, w, s);
  const Complex f = overlap(initial, s);
  if (std::abs(f) > 1.0 + 1e-9)
    throw consistency_error("|F| exceeds 1: " + std::to_string(std::abs(f)));
  return f;
}

Complex otoc_f(const CouplingGraph& graph, const HamiltonianTerms& terms, double t_ns,
               SitePauli w, SitePauli v, const StateVector& initial) {
  return otoc_f(Propagator(graph, terms), t_ns, w, v, initial);
}

double otoc_c(const Propagator& prop, double t_ns, SitePauli w, SitePauli v,
              const StateVector& initial) {
  const double c = 2.0 - 2.0 * otoc_f(prop, t_ns, w, v, initial).real();
  if (c < -1e-9 || c > 4.0 + 1e-9)
    throw consistency_error("squared commutator out of [0, 4]: " + std::to_string(c));
  return c;
}

double otoc_c(const CouplingGraph& graph, const HamiltonianTerms& terms, double t_ns,
              SitePauli w, SitePauli v, const StateVector& initial) {
  return otoc_c(Propagator(graph, terms), t_ns, w, v, initial);
}

DecomposedOtoc otoc_c_decomposed(const Propagator& prop, double t_ns, int i_site, int j_site,
                                 const StateVector& initial) {
  const SitePauli x_i = sigma_x(i_site), z_j = sigma_z(j_site);
  auto c_branch = [&](double sign) {
    // (1 + sign sigma_x^i)/sqrt(2) |psi>
    const StateVector flipped = apply_pauli(initial, x_i);
    StateVector projected{initial.n_sites,
                          (initial.amps + sign * flipped.amps) / std::sqrt(2.0)};
    StateVector s = heisenberg_apply(prop, t_ns, z_j, projected);
    s = apply_pauli(s, x_i);
    s = heisenberg_apply(prop, t_ns, z_j, s);
    const Complex value = overlap(projected, s);
    if (std::abs(value.imag()) > 1e-9)
      throw consistency_error("C_+- came out non-real");
    return value.real();
  };
  DecomposedOtoc d;
  d.c_plus = c_branch(+1.0);
  d.c_minus = c_branch(-1.0);
  d.c = otoc_c(prop, t_ns, z_j, x_i, initial);
  if (std::abs(d.c - (2.0 + d.c_minus - d.c_plus)) > 1e-9)
    throw consistency_error("OTOC decomposition identity violated: C=" + std::to_string(d.c) +
                            " vs " + std::to_string(2.0 + d.c_minus - d.c_plus));
  return d;
}

DecomposedOtoc otoc_c_decomposed(const CouplingGraph& graph, const HamiltonianTerms& terms,
                                 double t_ns, int i_site, int j_site,
                                 const StateVector& initial) {
  return otoc_c_decomposed(Propagator(graph, terms), t_ns, i_site, j_site, initial);
}

OtocCurve otoc_curve(const Propagator& prop, const Eigen::VectorXd& t_grid_ns, int i_site,
                     int j_site, const StateVector& initial) {
  const Eigen::Index n_t = t_grid_ns.size();
  OtocCurve curve;
  curve.times_ns = t_grid_ns;
  curve.f_values.resize(n_t);
  curve.c_values.resize(n_t);
  curve.c_plus.resize(n_t);
  curve.c_minus.resize(n_t);
  for (Eigen::Index k = 0; k < n_t; ++k) {
    const DecomposedOtoc d = otoc_c_decomposed(prop, t_grid_ns[k], i_site, j_site, initial);
    curve.f_values[k] = otoc_f(prop, t_grid_ns[k], sigma_z(j_site), sigma_x(i_site), initial);
    curve.c_values[k] = d.c;
    curve.c_plus[k] = d.c_plus;
    curve.c_minus[k] = d.c_minus;
  }
  return curve;
}

Eigen::VectorXd qubit_resolved_otoc(const Propagator& prop, double t_ns, SitePauli v,
                                    const StateVector& initial) {
  if (!is_basis_state(initial))
    throw argument_error("qubit-resolved OTOC requires a computational basis state");
  const int n = initial.n_sites;
  // <s| sz_i V(t) sz_i V(t) |s> = z_i(s) <u| sz_i |u> with u = V(t)|s>.
  const StateVector u = heisenberg_apply(prop, t_ns, v, initial);
  std::uint32_t s_index = 0;
  for (Eigen::Index i = 0; i < initial.dim(); ++i)
    if (std::norm(initial.amps[i]) > 0.5) s_index = static_cast<std::uint32_t>(i);
  Eigen::VectorXd c(n);
  for (int site = 0; site < n; ++site) {
    const double z_of_s = (s_index & site_bit_mask(n, site)) ? -1.0 : 1.0;
    const double value = z_of_s * expectation(u, sigma_z(site));
    if (std::abs(value) > 1.0 + 1e-9)
      throw consistency_error("qubit-resolved OTOC out of [-1, 1]");
    c[site] = value;
  }
  return c;
}

Eigen::VectorXd qubit_resolved_otoc(const CouplingGraph& graph, const HamiltonianTerms& terms,
                                    double t_ns, SitePauli v, const StateVector& initial) {
  return qubit_resolved_otoc(Propagator(graph, terms), t_ns, v, initial);
}

double otoc_sensitivity_oracle(const Eigen::VectorXd& c_values) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < c_values.size(); ++i) {
    if (std::abs(c_values[i]) > 1.0 + 1e-9)
      throw argument_error("qubit-resolved OTOC values must lie in [-1, 1]");
    sum += 1.0 - c_values[i];
  }
  return 0.5 * sum;
}

}  // namespace bfm
