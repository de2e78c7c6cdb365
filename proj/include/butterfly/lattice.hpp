#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <utility>
#include <vector>

namespace bfm {

/// Undirected coupling graph of the device. Edges are stored normalized
/// (first < second) in a fixed deterministic order; HamiltonianTerms and
/// noise traces key their per-edge data by this order.
struct CouplingGraph {
  int n_sites = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::string> labels;                // optional, q0..q8 for presets
  std::vector<std::array<double, 2>> positions;   // optional, for plotting

  int n_edges() const { return static_cast<int>(edges.size()); }
};

/// Per-site detunings and per-edge couplings, both angular (rad/ns).
struct HamiltonianTerms {
  Eigen::VectorXd detunings;
  std::vector<double> couplings;  // aligned with CouplingGraph::edges
};

/// Proper two-coloring of a bipartite graph; color_a is the sublattice the
/// Z-conjugation acts on.
struct Bipartition {
  std::vector<int> color_a;
  std::vector<int> color_b;
};

struct NegationReport {
  double max_residual = 0.0;  // max |S_z H S_z + H| over entries
  bool exact_negation = false;
};

/// Validates basic graph structure (bounds, no self-loops/duplicates) and
/// connectivity; throws argument_error on violation.
CouplingGraph make_graph(int n_sites, std::vector<std::pair<int, int>> edges,
                         bool require_connected = true);

/// The 9-site cross: center q0, first neighbors q1..q4, outer arms q5..q8.
CouplingGraph cross_lattice_9();

/// Open chain of n sites, used by tests and as a config preset.
CouplingGraph chain_lattice(int n_sites);

/// Preset by name: "cross9" or "chain<N>" (e.g. "chain3").
CouplingGraph graph_preset(const std::string& name);

/// Connected induced subgraph of the cross containing q0, grown in the fixed
/// order q0, q1, ..., q8. Site indices stay dense (site i keeps index i).
CouplingGraph sub_lattice(const CouplingGraph& cross, int n_active);

/// Deterministic BFS two-coloring with site 0 assigned to color_b.
/// Throws argument_error naming one odd cycle if the graph is not bipartite.
Bipartition two_coloring(const CouplingGraph& graph);

/// Uniform terms: every detuning f_mhz[i], every coupling j_mhz (inputs are
/// plain frequencies in MHz; stored angular in rad/ns).
HamiltonianTerms make_terms(const CouplingGraph& graph, double coupling_mhz,
                            const Eigen::VectorXd& detunings_mhz);
HamiltonianTerms zero_detuning_terms(const CouplingGraph& graph, double coupling_mhz = 5.0);

void validate_terms(const CouplingGraph& graph, const HamiltonianTerms& terms);

/// Dense H = sum_i (dw_i/2) sigma_i^z + sum_<ij> J_ij (s_i^+ s_j^- + s_i^- s_j^+)
/// in the frozen basis convention. Real symmetric by construction.
Eigen::MatrixXd build_hamiltonian(const CouplingGraph& graph, const HamiltonianTerms& terms);

/// Measures how well conjugation by the color_a sublattice Z string negates H.
NegationReport verify_negation(const CouplingGraph& graph, const HamiltonianTerms& terms,
                               const Bipartition& bipartition);

}  // namespace bfm
