#include "butterfly/runner.hpp"

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <ostream>
#include <sstream>

#include "butterfly/calibration.hpp"
#include "butterfly/csv.hpp"
#include "butterfly/errors.hpp"
#include "butterfly/scrambling.hpp"
#include "butterfly/svg.hpp"
#include "butterfly/version.hpp"

namespace bfm {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << v;
  return out.str();
}

std::uint64_t hash_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64(bytes);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

struct RunContext {
  const ExperimentConfig& config;
  fs::path out_dir;
  std::vector<fs::path> outputs;
  std::ostream& diag;

  void write_csv(const std::string& name, const csv::Row& header,
                 const std::vector<csv::Row>& rows) {
    const fs::path path = out_dir / name;
    csv::write(path, header, rows);
    outputs.push_back(path);
    diag << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
    if (config.emit_svg) emit_chart(name, header, rows);
  }

  void write_json(const std::string& name, const json& value) {
    const fs::path path = out_dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << value.dump(2) << '\n';
    outputs.push_back(path);
    diag << "wrote " << path.string() << '\n';
  }

  void emit_chart(const std::string& csv_name, const csv::Row& header,
                  const std::vector<csv::Row>& rows) {
    // Numeric columns vs the first column; non-numeric cells are skipped.
    std::vector<double> x;
    std::vector<svg::Series> series(header.size() > 1 ? header.size() - 1 : 0);
    for (std::size_t c = 0; c + 1 < header.size(); ++c) series[c].name = header[c + 1];
    for (const auto& row : rows) {
      try {
        x.push_back(std::stod(row.at(0)));
      } catch (...) {
        continue;
      }
      for (std::size_t c = 1; c < row.size() && c < header.size(); ++c) {
        try {
          series[c - 1].y.push_back(std::stod(row[c]));
        } catch (...) {
          series[c - 1].y.push_back(std::nan(""));
        }
      }
    }
    fs::path path = out_dir / csv_name;
    path.replace_extension(".svg");
    svg::write_line_chart(path, csv_name, x, series);
    outputs.push_back(path);
  }
};

double initial_s_z(const ProtocolSpec& spec) {
  std::uint32_t index = 0;
  for (int s = 0; s < spec.graph.n_sites; ++s)
    if (spec.initial_bits[s] == '1') index |= site_bit_mask(spec.graph.n_sites, s);
  return s_z_of_index(index, spec.graph.n_sites);
}

void run_loschmidt(RunContext& ctx) {
  const auto& config = ctx.config;
  const CouplingGraph graph = resolved_graph(config);
  const HamiltonianTerms terms = resolved_terms(config, graph);
  const Eigen::VectorXd t_grid = resolved_time_grid(config);
  std::optional<double> sigma;
  if (config.noise.sigma_freq_mhz > 0.0) sigma = config.noise.sigma_freq_mhz;
  const EchoCurve curve =
      loschmidt_echo(graph, terms, t_grid, config.probe_site, sigma,
                     config.noise.realizations, config.seed);
  std::vector<csv::Row> rows;
  for (Eigen::Index k = 0; k < curve.times_ns.size(); ++k)
    rows.push_back({csv::format_double(curve.times_ns[k]), csv::format_double(curve.ideal[k]),
                    csv::format_double(curve.mean[k]), csv::format_double(curve.stddev[k]),
                    csv::format_double(curve.p_return_mean[k])});
  ctx.write_csv("loschmidt.csv",
                {"t_ns", "fidelity_ideal", "fidelity_mean", "fidelity_std", "p_return_q0_mean"},
                rows);
}

void run_otoc(RunContext& ctx) {
  const auto& config = ctx.config;
  const CouplingGraph graph = resolved_graph(config);
  const HamiltonianTerms terms = resolved_terms(config, graph);
  const Propagator prop(graph, terms);
  const StateVector initial =
      basis_state(graph.n_sites, resolved_initial_bits(config, graph.n_sites));
  const int points =
      static_cast<int>(std::floor(config.otoc_t_max_ns / config.t_step_ns + 1e-9)) + 1;
  Eigen::VectorXd t_grid(points);
  for (int k = 0; k < points; ++k) t_grid[k] = k * config.t_step_ns;
  const OtocCurve curve =
      otoc_curve(prop, t_grid, config.otoc_x_site, config.otoc_z_site, initial);
  std::vector<csv::Row> rows;
  for (int k = 0; k < points; ++k)
    rows.push_back({csv::format_double(curve.times_ns[k]),
                    csv::format_double(curve.f_values[k].real()),
                    csv::format_double(curve.f_values[k].imag()),
                    csv::format_double(curve.c_values[k]), csv::format_double(curve.c_plus[k]),
                    csv::format_double(curve.c_minus[k])});
  ctx.write_csv("otoc.csv", {"t_ns", "f_real", "f_imag", "c", "c_plus", "c_minus"}, rows);
}

void run_fringe_experiment(RunContext& ctx) {
  const auto& config = ctx.config;
  ProtocolSpec spec = resolved_spec(config);
  const Propagator prop(spec.graph, spec.terms);
  const Bipartition bipartition = two_coloring(spec.graph);
  const Eigen::VectorXd t_grid = resolved_time_grid(config);
  std::vector<csv::Row> rows;
  for (Eigen::Index k = 0; k < t_grid.size(); ++k) {
    spec.t_ns = t_grid[k];
    const FringeData fringe = run_fringe(spec, prop, bipartition);
    for (Eigen::Index p = 0; p < fringe.phi.size(); ++p)
      rows.push_back({csv::format_double(t_grid[k]), csv::format_double(fringe.phi[p]),
                      csv::format_double(fringe.expectation[p])});
  }
  ctx.write_csv("fringe.csv", {"t_ns", "phi_rad", "expectation"}, rows);
}

void run_sensitivity(RunContext& ctx) {
  const auto& config = ctx.config;
  ProtocolSpec spec = resolved_spec(config);
  const Propagator prop(spec.graph, spec.terms);
  const Bipartition bipartition = two_coloring(spec.graph);
  const Eigen::VectorXd t_grid = resolved_time_grid(config);
  const StateVector initial = basis_state(spec.graph.n_sites, spec.initial_bits);
  const double sz0 = initial_s_z(spec);
  std::vector<csv::Row> rows;
  for (Eigen::Index k = 0; k < t_grid.size(); ++k) {
    spec.t_ns = t_grid[k];
    const SensitivityResult fit =
        fit_fringe(run_fringe(spec, prop, bipartition), spec.graph.n_sites);
    const Eigen::VectorXd c = qubit_resolved_otoc(prop, spec.t_ns, spec.v_op, initial);
    const double inv_eta_otoc = otoc_sensitivity_oracle(c);
    // V(t)|s> and its polarization mean; |S_z(s) - mu| is the slope route.
    StateVector u = propagate(initial, prop, spec.t_ns);
    u = apply_pauli(u, spec.v_op);
    u = propagate(u, prop, -spec.t_ns);
    const double mu = moments(polarization_distribution(u)).mu;
    rows.push_back({csv::format_double(t_grid[k]), csv::format_double(fit.inv_eta),
                    csv::format_double(inv_eta_otoc), csv::format_double(std::abs(sz0 - mu))});
  }
  ctx.write_csv("sensitivity.csv", {"t_ns", "inv_eta_fit", "inv_eta_otoc", "inv_eta_moment"},
                rows);
}

void run_scaling(RunContext& ctx) {
  const auto& config = ctx.config;
  const InitialMode mode =
      config.initial_bits == "random" ? InitialMode::Random : InitialMode::Fixed;
  ScalingOptions options;
  options.coupling_mhz = config.coupling_mhz;
  options.v_axis = config.v_axis;
  options.t_grid_ns = resolved_time_grid(config);
  options.phi_grid = resolved_phi_grid(config);
  if (mode == InitialMode::Fixed && config.initial_bits.size() == 9)
    options.initial_bits_full = config.initial_bits;
  const std::vector<ScalingRow> table =
      scaling_sweep(config.scaling_n_list, mode, config.scaling_samples, config.seed, options);
  std::vector<csv::Row> rows;
  for (const ScalingRow& row : table)
    rows.push_back({std::to_string(row.n), mode == InitialMode::Random ? "random" : "fixed",
                    csv::format_double(row.inv_eta_max), csv::format_double(row.t_opt_ns),
                    csv::format_double(row.stddev)});
  ctx.write_csv("scaling.csv", {"n", "mode", "inv_eta_max", "t_opt_ns", "std"}, rows);
}

void run_robustness(RunContext& ctx) {
  const auto& config = ctx.config;
  const ProtocolSpec spec = resolved_spec(config);
  const Eigen::VectorXd t_grid = resolved_time_grid(config);
  const std::vector<double> levels = {0.1, 0.2, 0.3, 0.4, 0.5};
  struct Kind {
    const char* name;
    void (*apply)(NoiseConfig&, double);
  };
  const Kind kinds[] = {
      {"freq", [](NoiseConfig& n, double s) { n.sigma_freq_mhz = s; }},
      {"phase", [](NoiseConfig& n, double s) { n.sigma_phase_rad = s; }},
      {"coupling", [](NoiseConfig& n, double s) { n.sigma_coupling_mhz = s; }},
  };
  std::vector<csv::Row> rows;
  for (const Kind& kind : kinds) {
    for (double sigma : levels) {
      NoiseConfig noise = config.noise;
      noise.sigma_freq_mhz = noise.sigma_coupling_mhz = noise.sigma_phase_rad = 0.0;
      noise.seed = config.seed;
      kind.apply(noise, sigma);
      const RobustnessCurve curve = noisy_butterfly(spec, t_grid, noise);
      ctx.diag << "robustness " << kind.name << " sigma=" << sigma
               << ": max 1/eta = " << curve.inv_eta_max << " at " << curve.t_opt_ns << " ns\n";
      for (Eigen::Index k = 0; k < curve.t_ns.size(); ++k)
        rows.push_back({kind.name, csv::format_double(sigma),
                        csv::format_double(curve.t_ns[k]), csv::format_double(curve.inv_eta[k]),
                        csv::format_double(curve.std_err[k]),
                        std::to_string(curve.realizations)});
    }
  }
  ctx.write_csv("robustness.csv",
                {"noise_kind", "sigma", "t_ns", "inv_eta_mean", "inv_eta_stderr",
                 "n_realizations"},
                rows);
}

void run_calibrate_distortion(RunContext& ctx) {
  const auto& config = ctx.config;
  if (config.calibration_input_csv.empty())
    throw argument_error("calibrate-distortion needs calibration.input_csv");
  const auto columns = csv::read_columns(config.calibration_input_csv, {"t_ns", "phi_rad"});
  const StepResponseFit fit =
      fit_step_response(columns[0], columns[1], config.nominal_sensitivity_mhz);
  json out;
  out["a_coef"] = fit.model.a_coef;
  out["tau_ns"] = fit.model.tau_ns;
  out["residual_norm"] = fit.residual_norm;
  out["iterations"] = fit.iterations;
  out["covariance"] = {{fit.covariance(0, 0), fit.covariance(0, 1)},
                       {fit.covariance(1, 0), fit.covariance(1, 1)}};
  ctx.write_json("distortion_fit.json", out);
}

void run_calibrate_fluxnoise(RunContext& ctx) {
  const auto& config = ctx.config;
  if (config.calibration_input_csv.empty())
    throw argument_error("calibrate-fluxnoise needs calibration.input_csv");
  const auto columns =
      csv::read_columns(config.calibration_input_csv, {"phi_Phi0", "gamma_per_us"});
  const DephasingFit fit = fit_gamma_vs_flux(columns[0], columns[1]);
  json out;
  out["gamma_i_per_us"] = fit.model.gamma_i_per_us;
  out["k_mhz_per_phi0"] = fit.model.k_mhz_per_phi0;
  out["residual_norm"] = fit.residual_norm;
  out["iterations"] = fit.iterations;
  out["curvature_ghz_per_phi0sq"] = config.curvature_ghz_per_phi0sq;
  out["sigma_phi_uphi0"] =
      flux_noise_sigma(fit.model.k_mhz_per_phi0, config.curvature_ghz_per_phi0sq);
  ctx.write_json("fluxnoise_fit.json", out);
}

using ExperimentFn = void (*)(RunContext&);

const std::map<std::string, ExperimentFn>& experiment_table() {
  static const std::map<std::string, ExperimentFn> table = {
      {"loschmidt", run_loschmidt},
      {"otoc", run_otoc},
      {"fringe", run_fringe_experiment},
      {"sensitivity", run_sensitivity},
      {"scaling", run_scaling},
      {"robustness", run_robustness},
      {"calibrate-distortion", run_calibrate_distortion},
      {"calibrate-fluxnoise", run_calibrate_fluxnoise},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : experiment_table()) out.push_back(name);
    return out;
  }();
  return names;
}

ExitCode run_experiment(const std::string& experiment, const ExperimentConfig& config,
                        std::ostream& diag) {
  const auto it = experiment_table().find(experiment);
  if (it == experiment_table().end()) {
    diag << "error: unknown experiment '" << experiment << "'; try --list\n";
    return ExitCode::UnknownExperiment;
  }
  const std::vector<std::string> violations = validate_config(config);
  if (!violations.empty()) {
    diag << "error: invalid configuration:\n";
    for (const auto& v : violations) diag << "  - " << v << '\n';
    return ExitCode::InvalidConfig;
  }

  RunContext ctx{config, fs::path(config.output_directory), {}, diag};
  try {
    fs::create_directories(ctx.out_dir);
    it->second(ctx);

    json manifest;
    manifest["tool"] = "butterfly";
    manifest["version"] = kVersion;
    manifest["experiment"] = experiment;
    manifest["seed"] = config.seed;
    manifest["config_hash"] = "fnv1a64:" + hex64(fnv1a64(canonical_config_json(config)));
    manifest["wall_clock_utc"] = utc_timestamp();
    json files = json::array();
    for (const fs::path& p : ctx.outputs)
      files.push_back({{"file", p.filename().string()},
                       {"fnv1a64", hex64(hash_file(p))}});
    manifest["outputs"] = files;
    const fs::path tmp = ctx.out_dir / "manifest.json.tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open " + tmp.string());
      out << manifest.dump(2) << '\n';
    }
    fs::rename(tmp, ctx.out_dir / "manifest.json");
  } catch (const argument_error& e) {
    diag << "error: invalid input: " << e.what() << '\n';
    return ExitCode::InvalidConfig;
  } catch (const consistency_error& e) {
    diag << "error: internal consistency: " << e.what() << '\n';
    return ExitCode::InternalError;
  } catch (const fs::filesystem_error& e) {
    diag << "error: I/O: " << e.what() << '\n';
    return ExitCode::IoError;
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << '\n';
    return ExitCode::IoError;
  }
  return ExitCode::Ok;
}

}  // namespace bfm
