#include "butterfly/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <set>

#include "butterfly/errors.hpp"
#include "butterfly/rng.hpp"
#include "butterfly/units.hpp"

namespace bfm {

namespace {

using nlohmann::json;

void reject_unknown(const json& object, const std::string& where,
                    const std::set<std::string>& known) {
  for (const auto& [key, value] : object.items())
    if (!known.count(key))
      throw argument_error("unknown config key '" + (where.empty() ? key : where + "." + key) +
                           "'");
}

PauliAxis axis_from_string(const std::string& s) {
  if (s == "x" || s == "X") return PauliAxis::X;
  if (s == "y" || s == "Y") return PauliAxis::Y;
  if (s == "z" || s == "Z") return PauliAxis::Z;
  throw argument_error("v_axis must be one of x, y, z; got '" + s + "'");
}

std::string axis_to_string(PauliAxis a) {
  switch (a) {
    case PauliAxis::X: return "x";
    case PauliAxis::Y: return "y";
    case PauliAxis::Z: return "z";
    default: return "i";
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw argument_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw argument_error("config root must be a JSON object");
  reject_unknown(root, "", {"seed", "lattice", "hamiltonian", "protocol", "noise",
                            "calibration", "output"});

  ExperimentConfig c;
  try {
    if (root.contains("seed")) c.seed = root["seed"].get<std::uint64_t>();
    if (root.contains("lattice")) {
      const json& sec = root["lattice"];
      reject_unknown(sec, "lattice", {"preset", "n_active"});
      if (sec.contains("preset")) c.lattice_preset = sec["preset"].get<std::string>();
      if (sec.contains("n_active")) c.n_active = sec["n_active"].get<int>();
    }
    if (root.contains("hamiltonian")) {
      const json& sec = root["hamiltonian"];
      reject_unknown(sec, "hamiltonian", {"coupling_mhz", "detunings_mhz"});
      if (sec.contains("coupling_mhz")) c.coupling_mhz = sec["coupling_mhz"].get<double>();
      if (sec.contains("detunings_mhz"))
        c.detunings_mhz = sec["detunings_mhz"].get<std::vector<double>>();
    }
    if (root.contains("protocol")) {
      const json& sec = root["protocol"];
      reject_unknown(sec, "protocol",
                     {"v_site", "v_axis", "initial_bits", "phi_min", "phi_max", "phi_points",
                      "t_max_ns", "t_step_ns", "probe_site", "otoc_x_site", "otoc_z_site",
                      "otoc_t_max_ns", "scaling_n_list", "scaling_samples"});
      if (sec.contains("v_site")) c.v_site = sec["v_site"].get<int>();
      if (sec.contains("v_axis")) c.v_axis = axis_from_string(sec["v_axis"].get<std::string>());
      if (sec.contains("initial_bits")) c.initial_bits = sec["initial_bits"].get<std::string>();
      if (sec.contains("phi_min")) c.phi_min = sec["phi_min"].get<double>();
      if (sec.contains("phi_max")) c.phi_max = sec["phi_max"].get<double>();
      if (sec.contains("phi_points")) c.phi_points = sec["phi_points"].get<int>();
      if (sec.contains("t_max_ns")) c.t_max_ns = sec["t_max_ns"].get<double>();
      if (sec.contains("t_step_ns")) c.t_step_ns = sec["t_step_ns"].get<double>();
      if (sec.contains("probe_site")) c.probe_site = sec["probe_site"].get<int>();
      if (sec.contains("otoc_x_site")) c.otoc_x_site = sec["otoc_x_site"].get<int>();
      if (sec.contains("otoc_z_site")) c.otoc_z_site = sec["otoc_z_site"].get<int>();
      if (sec.contains("otoc_t_max_ns")) c.otoc_t_max_ns = sec["otoc_t_max_ns"].get<double>();
      if (sec.contains("scaling_n_list"))
        c.scaling_n_list = sec["scaling_n_list"].get<std::vector<int>>();
      if (sec.contains("scaling_samples")) c.scaling_samples = sec["scaling_samples"].get<int>();
    }
    if (root.contains("noise")) {
      const json& sec = root["noise"];
      reject_unknown(sec, "noise",
                     {"sigma_freq_mhz", "sigma_coupling_mhz", "sigma_phase_rad", "tau_noise_ns",
                      "realizations", "shared_traces"});
      if (sec.contains("sigma_freq_mhz"))
        c.noise.sigma_freq_mhz = sec["sigma_freq_mhz"].get<double>();
      if (sec.contains("sigma_coupling_mhz"))
        c.noise.sigma_coupling_mhz = sec["sigma_coupling_mhz"].get<double>();
      if (sec.contains("sigma_phase_rad"))
        c.noise.sigma_phase_rad = sec["sigma_phase_rad"].get<double>();
      if (sec.contains("tau_noise_ns")) c.noise.tau_noise_ns = sec["tau_noise_ns"].get<double>();
      if (sec.contains("realizations")) c.noise.realizations = sec["realizations"].get<int>();
      if (sec.contains("shared_traces")) c.noise.shared_traces = sec["shared_traces"].get<bool>();
    }
    if (root.contains("calibration")) {
      const json& sec = root["calibration"];
      reject_unknown(sec, "calibration",
                     {"input_csv", "nominal_sensitivity_mhz", "curvature_ghz_per_phi0sq"});
      if (sec.contains("input_csv")) c.calibration_input_csv = sec["input_csv"].get<std::string>();
      if (sec.contains("nominal_sensitivity_mhz"))
        c.nominal_sensitivity_mhz = sec["nominal_sensitivity_mhz"].get<double>();
      if (sec.contains("curvature_ghz_per_phi0sq"))
        c.curvature_ghz_per_phi0sq = sec["curvature_ghz_per_phi0sq"].get<double>();
    }
    if (root.contains("output")) {
      const json& sec = root["output"];
      reject_unknown(sec, "output", {"directory", "emit_svg"});
      if (sec.contains("directory")) c.output_directory = sec["directory"].get<std::string>();
      if (sec.contains("emit_svg")) c.emit_svg = sec["emit_svg"].get<bool>();
    }
  } catch (const json::exception& e) {
    throw argument_error(std::string("config field has the wrong type: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& json_path) {
  std::ifstream in(json_path, std::ios::binary);
  if (!in) throw argument_error("cannot open config file " + json_path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

std::string canonical_config_json(const ExperimentConfig& c) {
  json root;
  root["seed"] = c.seed;
  root["lattice"] = {{"preset", c.lattice_preset}, {"n_active", c.n_active}};
  root["hamiltonian"] = {{"coupling_mhz", c.coupling_mhz}, {"detunings_mhz", c.detunings_mhz}};
  root["protocol"] = {{"v_site", c.v_site},
                      {"v_axis", axis_to_string(c.v_axis)},
                      {"initial_bits", c.initial_bits},
                      {"phi_min", c.phi_min},
                      {"phi_max", c.phi_max},
                      {"phi_points", c.phi_points},
                      {"t_max_ns", c.t_max_ns},
                      {"t_step_ns", c.t_step_ns},
                      {"probe_site", c.probe_site},
                      {"otoc_x_site", c.otoc_x_site},
                      {"otoc_z_site", c.otoc_z_site},
                      {"otoc_t_max_ns", c.otoc_t_max_ns},
                      {"scaling_n_list", c.scaling_n_list},
                      {"scaling_samples", c.scaling_samples}};
  root["noise"] = {{"sigma_freq_mhz", c.noise.sigma_freq_mhz},
                   {"sigma_coupling_mhz", c.noise.sigma_coupling_mhz},
                   {"sigma_phase_rad", c.noise.sigma_phase_rad},
                   {"tau_noise_ns", c.noise.tau_noise_ns},
                   {"realizations", c.noise.realizations},
                   {"shared_traces", c.noise.shared_traces}};
  root["calibration"] = {{"input_csv", c.calibration_input_csv},
                         {"nominal_sensitivity_mhz", c.nominal_sensitivity_mhz},
                         {"curvature_ghz_per_phi0sq", c.curvature_ghz_per_phi0sq}};
  root["output"] = {{"directory", c.output_directory}, {"emit_svg", c.emit_svg}};
  return root.dump();  // nlohmann objects iterate in sorted key order
}

CouplingGraph resolved_graph(const ExperimentConfig& config) {
  CouplingGraph preset = graph_preset(config.lattice_preset);
  if (config.n_active == 0 || config.n_active == preset.n_sites) return preset;
  if (config.lattice_preset != "cross9")
    throw argument_error("n_active is only meaningful for the cross9 preset");
  return sub_lattice(preset, config.n_active);
}

HamiltonianTerms resolved_terms(const ExperimentConfig& config, const CouplingGraph& graph) {
  Eigen::VectorXd detunings = Eigen::VectorXd::Zero(graph.n_sites);
  if (!config.detunings_mhz.empty()) {
    if (static_cast<int>(config.detunings_mhz.size()) != graph.n_sites)
      throw argument_error("detunings_mhz must have one entry per active site (" +
                           std::to_string(graph.n_sites) + ")");
    for (int i = 0; i < graph.n_sites; ++i) detunings[i] = config.detunings_mhz[i];
  }
  return make_terms(graph, config.coupling_mhz, detunings);
}

std::string resolved_initial_bits(const ExperimentConfig& config, int n_sites) {
  if (config.initial_bits.empty()) return std::string(n_sites, '0');
  if (config.initial_bits == "random") {
    GaussianStream stream(derive_stream_seed(config.seed, 0x1B175ULL));
    const std::uint32_t index =
        static_cast<std::uint32_t>(stream.next_word() % (1ULL << n_sites));
    std::string bits(n_sites, '0');
    for (int s = 0; s < n_sites; ++s)
      if (index & site_bit_mask(n_sites, s)) bits[s] = '1';
    return bits;
  }
  if (static_cast<int>(config.initial_bits.size()) != n_sites)
    throw argument_error("initial_bits length must equal the active site count");
  return config.initial_bits;
}

Eigen::VectorXd resolved_phi_grid(const ExperimentConfig& config) {
  if (config.phi_points < 2) throw argument_error("phi_points must be at least 2");
  if (!(config.phi_max > config.phi_min)) throw argument_error("phi_max must exceed phi_min");
  return Eigen::VectorXd::LinSpaced(config.phi_points, config.phi_min, config.phi_max);
}

Eigen::VectorXd resolved_time_grid(const ExperimentConfig& config) {
  if (!(config.t_step_ns > 0.0)) throw argument_error("t_step_ns must be positive");
  if (config.t_max_ns < 0.0) throw argument_error("t_max_ns must be non-negative");
  const int points = static_cast<int>(std::floor(config.t_max_ns / config.t_step_ns + 1e-9)) + 1;
  Eigen::VectorXd grid(points);
  for (int k = 0; k < points; ++k) grid[k] = k * config.t_step_ns;
  return grid;
}

ProtocolSpec resolved_spec(const ExperimentConfig& config) {
  CouplingGraph graph = resolved_graph(config);
  HamiltonianTerms terms = resolved_terms(config, graph);
  ProtocolSpec spec;
  spec.initial_bits = resolved_initial_bits(config, graph.n_sites);
  spec.graph = std::move(graph);
  spec.terms = std::move(terms);
  spec.v_op = SitePauli{config.v_site, config.v_axis};
  spec.phi_grid = resolved_phi_grid(config);
  validate_spec(spec);
  return spec;
}

std::vector<std::string> validate_config(const ExperimentConfig& config) {
  std::vector<std::string> violations;
  auto check = [&](const std::function<void()>& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      violations.emplace_back(e.what());
    }
  };

  CouplingGraph graph;
  bool have_graph = false;
  check([&] {
    graph = resolved_graph(config);
    have_graph = true;
  });
  if (have_graph) {
    check([&] { resolved_terms(config, graph); });
    check([&] { resolved_spec(config); });
    check([&] {
      if (config.probe_site < 0 || config.probe_site >= graph.n_sites)
        throw argument_error("probe_site out of range");
      if (config.otoc_x_site < 0 || config.otoc_x_site >= graph.n_sites ||
          config.otoc_z_site < 0 || config.otoc_z_site >= graph.n_sites)
        throw argument_error("otoc sites out of range");
    });
    check([&] {
      if (config.phi_points < 2 * graph.n_sites + 1)
        throw argument_error("insufficient grid for Fourier fit: need at least " +
                             std::to_string(2 * graph.n_sites + 1) + " phi points");
    });
  }
  check([&] { resolved_phi_grid(config); });
  check([&] { resolved_time_grid(config); });
  check([&] { validate_noise_config(config.noise); });
  check([&] {
    for (int n : config.scaling_n_list)
      if (n < 1 || n > 9) throw argument_error("scaling_n_list entries must lie in [1, 9]");
    if (config.scaling_samples < 1) throw argument_error("scaling_samples must be positive");
  });
  check([&] {
    if (!(config.otoc_t_max_ns >= 0.0)) throw argument_error("otoc_t_max_ns must be >= 0");
  });
  return violations;
}

}  // namespace bfm
