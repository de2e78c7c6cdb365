#include "butterfly/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "butterfly/errors.hpp"
#include "butterfly/rng.hpp"
#include "butterfly/units.hpp"

namespace bfm {

namespace {

Eigen::VectorXd linspace(double lo, double hi, int points) {
  return Eigen::VectorXd::LinSpaced(points, lo, hi);
}

StateVector heisenberg_v(const ProtocolSpec& spec, const Propagator& prop,
                         const StateVector& state) {
  // V(t)|psi>
  StateVector s = propagate(state, prop, spec.t_ns);
  s = apply_pauli(s, spec.v_op);
  return propagate(s, prop, -spec.t_ns);
}

bool all_zero_bits(const std::string& bits) {
  return bits.find_first_not_of('0') == std::string::npos;
}

}  // namespace

Eigen::VectorXd default_phi_grid() { return linspace(-1.1 * kPi, 1.1 * kPi, 81); }

Eigen::VectorXd default_time_grid() { return linspace(0.0, 200.0, 41); }

ProtocolSpec make_protocol_spec(CouplingGraph graph, HamiltonianTerms terms) {
  ProtocolSpec spec;
  spec.initial_bits.assign(graph.n_sites, '0');
  spec.graph = std::move(graph);
  spec.terms = std::move(terms);
  spec.phi_grid = default_phi_grid();
  validate_spec(spec);
  return spec;
}

void validate_spec(const ProtocolSpec& spec) {
  validate_terms(spec.graph, spec.terms);
  if (spec.v_op.site < 0 || spec.v_op.site >= spec.graph.n_sites)
    throw argument_error("v_op site out of range");
  if (spec.v_op.axis == PauliAxis::I)
    throw argument_error("v_op must be a proper Pauli axis");
  if (static_cast<int>(spec.initial_bits.size()) != spec.graph.n_sites)
    throw argument_error("initial_bits length does not match site count");
  if (spec.initial_bits.find_first_not_of("01") != std::string::npos)
    throw argument_error("initial_bits must contain only '0'/'1'");
  if (!std::isfinite(spec.t_ns)) throw argument_error("t must be finite");
  for (Eigen::Index i = 1; i < spec.phi_grid.size(); ++i)
    if (!(spec.phi_grid[i] > spec.phi_grid[i - 1]))
      throw argument_error("phi grid must be strictly increasing");
}

StateVector prepare_butterfly(const ProtocolSpec& spec, const Propagator& prop,
                              const Bipartition& bipartition) {
  StateVector s = basis_state(spec.graph.n_sites, spec.initial_bits);
  s = propagate(s, prop, spec.t_ns);
  s = apply_site_rotation(s, spec.v_op, kPi / 4.0);
  return reverse_evolve(s, prop, spec.t_ns, bipartition);
}

StateVector prepare_butterfly(const ProtocolSpec& spec) {
  validate_spec(spec);
  return prepare_butterfly(spec, Propagator(spec.graph, spec.terms), two_coloring(spec.graph));
}

StateVector sense(const StateVector& state, double phi) { return global_z_phase(state, phi); }

double readout_expectation(const StateVector& state, const ProtocolSpec& spec,
                           const Propagator& prop) {
  const StateVector forward = propagate(state, prop, spec.t_ns);
  return expectation(forward, spec.v_op);
}

double readout_expectation(const StateVector& state, const ProtocolSpec& spec) {
  return readout_expectation(state, spec, Propagator(spec.graph, spec.terms));
}

double analytic_expectation(const ProtocolSpec& spec, double phi, const Propagator& prop) {
  if (!all_zero_bits(spec.initial_bits))
    throw argument_error("analytic_expectation is derived for the polarized state |0...0>");
  const int n = spec.graph.n_sites;
  const StateVector zero = basis_state(n, spec.initial_bits);
  const StateVector u = heisenberg_v(spec, prop, zero);

  const Complex u0 = u.amps[0];  // <0|V(t)|0>
  if (std::abs(u0.imag()) > 1e-9)
    throw consistency_error("<0|V(t)|0> came out non-real");
  const double term1 = 0.5 * u0.real();

  // (1/2) <u| e^{i phi S_z} V(t) e^{-i phi S_z} |u>
  StateVector chain = global_z_phase(u, phi);
  chain = heisenberg_v(spec, prop, chain);
  chain = global_z_phase(chain, -phi);
  const Complex mid = overlap(u, chain);
  if (std::abs(mid.imag()) > 1e-9)
    throw consistency_error("middle term of <V>_phi came out non-real");
  const double term2 = 0.5 * mid.real();

  // -Im[e^{i phi N/2} <u| e^{-i phi S_z} |u>]
  const Complex chi_direct = overlap(u, global_z_phase(u, phi));
  const Complex rotated = std::polar(1.0, phi * 0.5 * n) * chi_direct;
  const double term3 = -rotated.imag();

  const double value = term1 + term2 + term3;

  // When the first two terms vanish, the chi-form is the whole signal.
  if (std::abs(term1) <= 1e-9 && std::abs(term2) <= 1e-9) {
    const Complex chi = characteristic_sum(polarization_distribution(u), phi);
    const double chi_form = -(std::polar(1.0, phi * 0.5 * n) * chi).imag();
    if (std::abs(value - chi_form) > 1e-9)
      throw consistency_error("three-term <V>_phi disagrees with the chi(phi) form");
  }
  return value;
}

double analytic_expectation(const ProtocolSpec& spec, double phi) {
  validate_spec(spec);
  return analytic_expectation(spec, phi, Propagator(spec.graph, spec.terms));
}

Complex characteristic_sum(const PolarizationDistribution& dist, double phi) {
  Complex chi = 0.0;
  for (int k = 0; k <= dist.n_sites; ++k)
    chi += dist.weights[k] * std::polar(1.0, -phi * dist.s_z(k));
  return chi;
}

MomentSet moments(const PolarizationDistribution& dist) {
  MomentSet m;
  for (int k = 0; k <= dist.n_sites; ++k) {
    const double sz = dist.s_z(k), w = dist.weights[k];
    m.mu += w * sz;
    m.m2 += w * sz * sz;
    m.m3 += w * sz * sz * sz;
  }
  const double half_n = 0.5 * dist.n_sites;
  if (std::abs(m.mu) > half_n + 1e-9 || m.m2 < m.mu * m.mu - 1e-9)
    throw consistency_error("polarization moments violate their bounds");
  return m;
}

double taylor_expectation(const MomentSet& m, int n_sites, double phi) {
  if (std::abs(phi) >= 0.5)
    throw argument_error("taylor_expectation is a small-phase expansion; |phi| < 0.5 required");
  const double n = n_sites;
  const double cubic = m.m3 / 6.0 - n * m.m2 / 4.0 + m.mu * n * n / 8.0 - n * n * n / 48.0;
  return -phi * (0.5 * n - m.mu) - phi * phi * phi * cubic;
}

FringeData run_fringe(const ProtocolSpec& spec, const Propagator& prop,
                      const Bipartition& bipartition) {
  const StateVector butterfly = prepare_butterfly(spec, prop, bipartition);
  FringeData data;
  data.phi = spec.phi_grid;
  data.expectation.resize(spec.phi_grid.size());
  data.measured_op = spec.v_op;
  for (Eigen::Index i = 0; i < spec.phi_grid.size(); ++i) {
    const double m = readout_expectation(sense(butterfly, spec.phi_grid[i]), spec, prop);
    if (std::abs(m) > 1.0 + 1e-9)
      throw consistency_error("fringe expectation escaped [-1, 1]: " + std::to_string(m));
    data.expectation[i] = m;
  }
  return data;
}

FringeData run_fringe(const ProtocolSpec& spec) {
  validate_spec(spec);
  return run_fringe(spec, Propagator(spec.graph, spec.terms), two_coloring(spec.graph));
}

SensitivityResult fit_fringe(const FringeData& data, int n_harmonics) {
  const Eigen::Index rows = data.phi.size();
  const Eigen::Index cols = 2 * n_harmonics + 1;
  if (n_harmonics < 1) throw argument_error("need at least one harmonic");
  if (rows < cols)
    throw fit_error("fringe fit needs at least " + std::to_string(cols) + " phase points, got " +
                    std::to_string(rows));
  Eigen::MatrixXd design(rows, cols);
  design.col(0).setOnes();
  for (int k = 1; k <= n_harmonics; ++k) {
    design.col(2 * k - 1) = (data.phi.array() * k).cos();
    design.col(2 * k) = (data.phi.array() * k).sin();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < cols) throw fit_error("singular fringe design matrix");
  const Eigen::VectorXd coeffs = qr.solve(data.expectation);

  SensitivityResult result;
  result.cos_coeffs.resize(n_harmonics + 1);
  result.sin_coeffs.resize(n_harmonics);
  result.cos_coeffs[0] = coeffs[0];
  for (int k = 1; k <= n_harmonics; ++k) {
    result.cos_coeffs[k] = coeffs[2 * k - 1];
    result.sin_coeffs[k - 1] = coeffs[2 * k];
  }
  double slope = 0.0, at_zero = 0.0;
  for (int k = 1; k <= n_harmonics; ++k) slope += k * result.sin_coeffs[k - 1];
  at_zero = result.cos_coeffs.sum();
  result.slope = slope;
  result.delta_m = std::sqrt(std::max(1.0 - at_zero * at_zero, 0.0));
  result.inv_eta = result.delta_m > 0.0 ? std::abs(slope) / result.delta_m : 0.0;
  result.residual_norm = (design * coeffs - data.expectation).norm();
  return result;
}

std::vector<ScalingRow> scaling_sweep(const std::vector<int>& n_list, InitialMode mode,
                                      int samples, std::uint64_t seed,
                                      const ScalingOptions& options) {
  const Eigen::VectorXd t_grid =
      options.t_grid_ns.size() ? options.t_grid_ns : default_time_grid();
  const Eigen::VectorXd phi_grid =
      options.phi_grid.size() ? options.phi_grid : default_phi_grid();
  const std::string bits_full =
      options.initial_bits_full.empty() ? std::string(9, '0') : options.initial_bits_full;
  if (bits_full.size() != 9 || bits_full.find_first_not_of("01") != std::string::npos)
    throw argument_error("initial_bits_full must be 9 bits");
  if (mode == InitialMode::Random && samples < 1)
    throw argument_error("random mode needs at least one sample");

  const CouplingGraph cross = cross_lattice_9();
  std::vector<ScalingRow> rows;
  for (int n : n_list) {
    if (n < 1 || n > 9) throw argument_error("scaling sweep sizes must lie in [1, 9]");
    const CouplingGraph graph = sub_lattice(cross, n);
    ProtocolSpec spec = make_protocol_spec(
        graph, make_terms(graph, options.coupling_mhz, Eigen::VectorXd::Zero(n)));
    spec.v_op = SitePauli{0, options.v_axis};
    spec.phi_grid = phi_grid;
    const Propagator prop(spec.graph, spec.terms);
    const Bipartition bipartition = two_coloring(spec.graph);

    std::vector<std::string> initials;
    if (mode == InitialMode::Fixed) {
      initials.push_back(bits_full.substr(0, n));
    } else {
      // Distinct basis indices, uniform over [0, 2^n), in draw order.
      const std::uint32_t dim = 1u << n;
      const int want = std::min<int>(samples, static_cast<int>(dim));
      GaussianStream stream(derive_stream_seed(seed, static_cast<std::uint64_t>(n)));
      std::set<std::uint32_t> taken;
      while (static_cast<int>(initials.size()) < want) {
        const auto idx = static_cast<std::uint32_t>(stream.next_word() % dim);
        if (!taken.insert(idx).second) continue;
        std::string bits(n, '0');
        for (int site = 0; site < n; ++site)
          if (idx & site_bit_mask(n, site)) bits[site] = '1';
        initials.push_back(bits);
      }
    }

    Eigen::MatrixXd curves(static_cast<Eigen::Index>(initials.size()), t_grid.size());
    for (std::size_t s = 0; s < initials.size(); ++s) {
      spec.initial_bits = initials[s];
      for (Eigen::Index k = 0; k < t_grid.size(); ++k) {
        spec.t_ns = t_grid[k];
        const FringeData fringe = run_fringe(spec, prop, bipartition);
        curves(static_cast<Eigen::Index>(s), k) = fit_fringe(fringe, n).inv_eta;
      }
    }

    ScalingRow row;
    row.n = n;
    row.mode = mode;
    Eigen::VectorXd maxima(curves.rows());
    for (Eigen::Index s = 0; s < curves.rows(); ++s) maxima[s] = curves.row(s).maxCoeff();
    row.inv_eta_max = maxima.mean();
    if (curves.rows() > 1) {
      const double m = maxima.mean();
      row.stddev = std::sqrt((maxima.array() - m).square().sum() / (maxima.size() - 1));
    }
    const Eigen::VectorXd mean_curve = curves.colwise().mean();
    Eigen::Index argmax = 0;
    mean_curve.maxCoeff(&argmax);
    row.t_opt_ns = t_grid[argmax];
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bfm
