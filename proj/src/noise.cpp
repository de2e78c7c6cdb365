#include "butterfly/noise.hpp"

#include <bit>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "butterfly/errors.hpp"
#include "butterfly/parallel.hpp"
#include "butterfly/rng.hpp"
#include "butterfly/units.hpp"

namespace bfm {

namespace {

constexpr double kTimeEps = 1e-9;  // ns; guards segment boundary arithmetic

int segments_for(double t_ns, double tau_ns) {
  if (t_ns <= kTimeEps) return 0;
  return static_cast<int>(std::ceil(t_ns / tau_ns - kTimeEps));
}

HamiltonianTerms perturbed_terms(const HamiltonianTerms& terms,
                                 const NoiseRealization& realization, int segment) {
  HamiltonianTerms out = terms;
  out.detunings += realization.detuning_offsets.row(segment).transpose();
  for (std::size_t e = 0; e < out.couplings.size(); ++e)
    out.couplings[e] += realization.coupling_offsets(segment, static_cast<Eigen::Index>(e));
  return out;
}

void check_coverage(const NoiseRealization& realization, double t_ns) {
  if (t_ns < 0.0 || !std::isfinite(t_ns))
    throw argument_error("noisy propagation time must be finite and non-negative");
  if (realization.covered_ns() + kTimeEps < t_ns)
    throw argument_error("noise realization covers " + std::to_string(realization.covered_ns()) +
                         " ns, requested " + std::to_string(t_ns));
}

/// Builds segment propagators on demand and remembers them.
class SegmentCache {
 public:
  SegmentCache(const CouplingGraph& graph, const HamiltonianTerms& terms,
               const NoiseRealization& realization)
      : graph_(graph), terms_(terms), realization_(realization),
        slots_(realization.n_segments()) {}

  const Propagator& segment(int s) {
    if (!slots_[s])
      slots_[s] = std::make_unique<Propagator>(graph_, perturbed_terms(terms_, realization_, s));
    return *slots_[s];
  }

 private:
  const CouplingGraph& graph_;
  const HamiltonianTerms& terms_;
  const NoiseRealization& realization_;
  std::vector<std::unique_ptr<Propagator>> slots_;
};

StateVector play_segments(SegmentCache& cache, const NoiseRealization& realization,
                          const StateVector& state, double t_ns, bool mirrored) {
  const double tau = realization.tau_ns;
  const int n_seg = segments_for(t_ns, tau);
  StateVector s = state;
  if (!mirrored) {
    for (int k = 0; k < n_seg; ++k) {
      const double len = std::min(tau, t_ns - k * tau);
      if (len <= kTimeEps) break;
      s = propagate(s, cache.segment(k), len);
    }
  } else {
    for (int k = n_seg - 1; k >= 0; --k) {
      const double len = std::min(tau, t_ns - k * tau);
      if (len <= kTimeEps) continue;
      s = propagate(s, cache.segment(k), len);
    }
  }
  return s;
}

}  // namespace

void validate_noise_config(const NoiseConfig& config) {
  if (config.sigma_freq_mhz < 0.0 || config.sigma_coupling_mhz < 0.0 ||
      config.sigma_phase_rad < 0.0)
    throw argument_error("noise strengths must be non-negative");
  if (!(config.tau_noise_ns > 0.0)) throw argument_error("tau_noise must be positive");
  if (config.realizations < 1) throw argument_error("need at least one realization");
}

NoiseRealization sample_realization(const NoiseConfig& config, const CouplingGraph& graph,
                                    double t_total_ns, int index) {
  validate_noise_config(config);
  if (t_total_ns < 0.0) throw argument_error("t_total must be non-negative");
  const int n_seg = segments_for(t_total_ns, config.tau_noise_ns);
  NoiseRealization r;
  r.tau_ns = config.tau_noise_ns;
  r.detuning_offsets.resize(n_seg, graph.n_sites);
  r.coupling_offsets.resize(n_seg, graph.n_edges());
  GaussianStream stream(derive_stream_seed(config.seed, static_cast<std::uint64_t>(index)));
  const double sigma_w = omega_from_mhz(config.sigma_freq_mhz);
  const double sigma_j = omega_from_mhz(config.sigma_coupling_mhz);
  for (int s = 0; s < n_seg; ++s) {
    for (int site = 0; site < graph.n_sites; ++site)
      r.detuning_offsets(s, site) = stream.next(sigma_w);
    for (int e = 0; e < graph.n_edges(); ++e)
      r.coupling_offsets(s, e) = stream.next(sigma_j);
  }
  r.phase_offset = stream.next(config.sigma_phase_rad);
  return r;
}

StateVector noisy_propagate(const StateVector& state, const CouplingGraph& graph,
                            const HamiltonianTerms& terms, const NoiseRealization& realization,
                            double t_ns) {
  check_coverage(realization, t_ns);
  SegmentCache cache(graph, terms, realization);
  return play_segments(cache, realization, state, t_ns, /*mirrored=*/false);
}

StateVector noisy_propagate_mirrored(const StateVector& state, const CouplingGraph& graph,
                                     const HamiltonianTerms& terms,
                                     const NoiseRealization& realization, double t_ns) {
  check_coverage(realization, t_ns);
  SegmentCache cache(graph, terms, realization);
  return play_segments(cache, realization, state, t_ns, /*mirrored=*/true);
}

namespace {

/// Fringe harmonic content of one prepared state: the readout expectation at
/// signal phase phi is sum_m Re[e^{i phi m} T_m], where m runs over S_z
/// transfer between sectors connected by the readout operator. Evaluating the
/// T_m once per prepared state makes the phi sweep (and per-realization phase
/// offsets) essentially free.
struct FringeCoefficients {
  Eigen::VectorXcd t_m;  // index m + n_sites -> coefficient, m in [-n, n]
};

FringeCoefficients fringe_coefficients(const StateVector& prepared, const ProtocolSpec& spec,
                                       const Propagator& ideal,
                                       const std::vector<std::vector<Eigen::Index>>& sectors) {
  const int n = prepared.n_sites;
  FringeCoefficients out;
  out.t_m = Eigen::VectorXcd::Zero(2 * n + 1);
  for (int exc = 0; exc <= n; ++exc) {
    const auto& members = sectors[exc];
    double weight = 0.0;
    for (Eigen::Index idx : members) weight += std::norm(prepared.amps[idx]);
    if (weight < 1e-28) continue;
    StateVector component{n, Eigen::VectorXcd::Zero(prepared.dim())};
    for (Eigen::Index idx : members) component.amps[idx] = prepared.amps[idx];
    // O = U^dag(t) V U(t) applied to this sector slice.
    StateVector image = propagate(component, ideal, spec.t_ns);
    image = apply_pauli(image, spec.v_op);
    image = propagate(image, ideal, -spec.t_ns);
    for (int exc_out = 0; exc_out <= n; ++exc_out) {
      Complex acc = 0.0;
      for (Eigen::Index idx : sectors[exc_out]) acc += std::conj(prepared.amps[idx]) * image.amps[idx];
      if (acc == 0.0) continue;
      // S_z(out) - S_z(in) = exc - exc_out
      out.t_m[(exc - exc_out) + n] += acc;
    }
  }
  return out;
}

double fringe_value(const FringeCoefficients& coeffs, int n, double phi) {
  double value = coeffs.t_m[n].real();  // m = 0
  for (int m = 1; m <= n; ++m) {
    const Complex up = coeffs.t_m[m + n], down = coeffs.t_m[n - m];
    value += (std::polar(1.0, phi * m) * up).real();
    value += (std::polar(1.0, -phi * m) * down).real();
  }
  return value;
}

}  // namespace

RobustnessCurve noisy_butterfly(const ProtocolSpec& base, const Eigen::VectorXd& t_grid_ns,
                                const NoiseConfig& config, int bootstrap_resamples) {
  validate_spec(base);
  validate_noise_config(config);
  if (t_grid_ns.size() == 0) throw argument_error("empty time grid");
  for (Eigen::Index k = 1; k < t_grid_ns.size(); ++k)
    if (!(t_grid_ns[k] > t_grid_ns[k - 1]))
      throw argument_error("time grid must be strictly increasing");
  if (t_grid_ns[0] < 0.0) throw argument_error("time grid must be non-negative");

  const int n = base.graph.n_sites;
  const int n_harmonics = n;
  const Eigen::Index n_t = t_grid_ns.size();
  const int n_real = config.realizations;
  const double t_max = t_grid_ns[n_t - 1];
  const Propagator ideal(base.graph, base.terms);
  const Bipartition bipartition = two_coloring(base.graph);
  const bool hamiltonian_noise =
      config.sigma_freq_mhz > 0.0 || config.sigma_coupling_mhz > 0.0;

  std::vector<std::vector<Eigen::Index>> sectors(n + 1);
  for (Eigen::Index idx = 0; idx < (Eigen::Index(1) << n); ++idx)
    sectors[std::popcount(static_cast<std::uint32_t>(idx))].push_back(idx);

  // Per (time, realization) harmonic coefficients with the realization's
  // phase offset folded in: T~_m = e^{i eta m} T_m.
  std::vector<Eigen::MatrixXcd> coeffs(n_t);
  for (auto& c : coeffs) c.resize(n_real, 2 * n + 1);

  if (!hamiltonian_noise) {
    // Preparation is noise-free; only the sensed phase differs per
    // realization. Prepare once per time and twist.
    std::vector<FringeCoefficients> shared(n_t);
    parallel_for(static_cast<std::size_t>(n_t), [&](std::size_t k) {
      ProtocolSpec spec = base;
      spec.t_ns = t_grid_ns[static_cast<Eigen::Index>(k)];
      const StateVector prepared = prepare_butterfly(spec, ideal, bipartition);
      shared[k] = fringe_coefficients(prepared, spec, ideal, sectors);
    });
    for (int r = 0; r < n_real; ++r) {
      const NoiseRealization trace = sample_realization(config, base.graph, t_max, 2 * r);
      for (Eigen::Index k = 0; k < n_t; ++k)
        for (int m = -n; m <= n; ++m)
          coeffs[k](r, m + n) = std::polar(1.0, trace.phase_offset * m) * shared[k].t_m[m + n];
    }
  } else {
    parallel_for(static_cast<std::size_t>(n_real), [&](std::size_t r) {
      const NoiseRealization fwd =
          sample_realization(config, base.graph, t_max, static_cast<int>(2 * r));
      const NoiseRealization rev =
          config.shared_traces
              ? fwd
              : sample_realization(config, base.graph, t_max, static_cast<int>(2 * r + 1));
      SegmentCache fwd_cache(base.graph, base.terms, fwd);
      SegmentCache rev_cache(base.graph, base.terms, rev);

      StateVector running = basis_state(n, base.initial_bits);
      double reached = 0.0;
      for (Eigen::Index k = 0; k < n_t; ++k) {
        const double t = t_grid_ns[k];
        // Advance the forward stage incrementally across segment boundaries.
        while (reached + kTimeEps < t) {
          const int seg = static_cast<int>(reached / fwd.tau_ns + kTimeEps);
          const double stop = std::min((seg + 1) * fwd.tau_ns, t);
          running = propagate(running, fwd_cache.segment(seg), stop - reached);
          reached = stop;
        }
        ProtocolSpec spec = base;
        spec.t_ns = t;
        StateVector s = apply_site_rotation(running, spec.v_op, kPi / 4.0);
        s = apply_sublattice_z(s, bipartition.color_a);
        s = play_segments(rev_cache, rev, s, t, /*mirrored=*/true);
        s = apply_sublattice_z(s, bipartition.color_a);
        const FringeCoefficients fc = fringe_coefficients(s, spec, ideal, sectors);
        for (int m = -n; m <= n; ++m)
          coeffs[k](static_cast<Eigen::Index>(r), m + n) =
              std::polar(1.0, fwd.phase_offset * m) * fc.t_m[m + n];
      }
    });
  }

  const Eigen::Index n_phi = base.phi_grid.size();
  auto fit_from_mean = [&](const Eigen::VectorXcd& mean_tm) {
    FringeCoefficients fc{mean_tm};
    FringeData data;
    data.phi = base.phi_grid;
    data.expectation.resize(n_phi);
    data.measured_op = base.v_op;
    for (Eigen::Index p = 0; p < n_phi; ++p)
      data.expectation[p] = fringe_value(fc, n, base.phi_grid[p]);
    return fit_fringe(data, n_harmonics).inv_eta;
  };

  RobustnessCurve curve;
  curve.t_ns = t_grid_ns;
  curve.inv_eta.resize(n_t);
  curve.std_err = Eigen::VectorXd::Zero(n_t);
  curve.realizations = n_real;
  for (Eigen::Index k = 0; k < n_t; ++k)
    curve.inv_eta[k] = fit_from_mean(coeffs[k].colwise().mean());
  Eigen::Index argmax = 0;
  curve.inv_eta_max = curve.inv_eta.maxCoeff(&argmax);
  curve.t_opt_ns = t_grid_ns[argmax];

  if (bootstrap_resamples > 1 && n_real > 1) {
    std::mt19937_64 eng(derive_stream_seed(config.seed, 0xB00757ULL));
    Eigen::MatrixXd boot(bootstrap_resamples, n_t);
    for (int b = 0; b < bootstrap_resamples; ++b) {
      std::vector<int> picks(n_real);
      for (int& p : picks) p = static_cast<int>(eng() % static_cast<std::uint64_t>(n_real));
      for (Eigen::Index k = 0; k < n_t; ++k) {
        Eigen::VectorXcd mean_tm = Eigen::VectorXcd::Zero(2 * n + 1);
        for (int p : picks) mean_tm += coeffs[k].row(p).transpose();
        mean_tm /= static_cast<double>(n_real);
        boot(b, k) = fit_from_mean(mean_tm);
      }
    }
    for (Eigen::Index k = 0; k < n_t; ++k) {
      const double m = boot.col(k).mean();
      curve.std_err[k] =
          std::sqrt((boot.col(k).array() - m).square().sum() / (bootstrap_resamples - 1));
    }
    Eigen::VectorXd maxima = boot.rowwise().maxCoeff();
    const double m = maxima.mean();
    curve.max_std_err =
        std::sqrt((maxima.array() - m).square().sum() / (bootstrap_resamples - 1));
  }
  return curve;
}

}  // namespace bfm
