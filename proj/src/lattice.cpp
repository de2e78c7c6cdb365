#include "butterfly/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <set>

#include "butterfly/errors.hpp"
#include "butterfly/state.hpp"
#include "butterfly/units.hpp"

namespace bfm {

CouplingGraph make_graph(int n_sites, std::vector<std::pair<int, int>> edges,
                         bool require_connected) {
  if (n_sites < 1 || n_sites > StateVector::kMaxSites)
    throw argument_error("graph must have between 1 and 12 sites");
  std::set<std::pair<int, int>> seen;
  for (auto& e : edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.first == e.second) throw argument_error("graph has a self-loop at site " +
                                                  std::to_string(e.first));
    if (e.first < 0 || e.second >= n_sites) throw argument_error("edge endpoint out of range");
    if (!seen.insert(e).second)
      throw argument_error("duplicate edge " + std::to_string(e.first) + "-" +
                           std::to_string(e.second));
  }
  if (require_connected && n_sites > 1) {
    std::vector<char> reached(n_sites, 0);
    std::deque<int> queue{0};
    reached[0] = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (const auto& [a, b] : edges) {
        const int other = (a == u) ? b : (b == u ? a : -1);
        if (other >= 0 && !reached[other]) {
          reached[other] = 1;
          queue.push_back(other);
        }
      }
    }
    if (std::count(reached.begin(), reached.end(), 1) != n_sites)
      throw argument_error("graph is not connected");
  }
  return CouplingGraph{n_sites, std::move(edges), {}, {}};
}

CouplingGraph cross_lattice_9() {
  CouplingGraph g = make_graph(9, {{0, 1}, {0, 2}, {0, 3}, {0, 4},
                                   {1, 5}, {2, 6}, {3, 7}, {4, 8}});
  for (int i = 0; i < 9; ++i) g.labels.push_back("q" + std::to_string(i));
  g.positions = {{0, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1},
                 {2, 0}, {0, 2}, {-2, 0}, {0, -2}};
  return g;
}

CouplingGraph chain_lattice(int n_sites) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n_sites; ++i) edges.emplace_back(i, i + 1);
  CouplingGraph g = make_graph(n_sites, std::move(edges));
  for (int i = 0; i < n_sites; ++i) {
    g.labels.push_back("q" + std::to_string(i));
    g.positions.push_back({static_cast<double>(i), 0.0});
  }
  return g;
}

CouplingGraph graph_preset(const std::string& name) {
  if (name == "cross9") return cross_lattice_9();
  if (name.rfind("chain", 0) == 0) {
    const std::string suffix = name.substr(5);
    if (!suffix.empty() && suffix.find_first_not_of("0123456789") == std::string::npos)
      return chain_lattice(std::stoi(suffix));
  }
  throw argument_error("unknown lattice preset '" + name + "' (expected cross9 or chain<N>)");
}

CouplingGraph sub_lattice(const CouplingGraph& cross, int n_active) {
  const CouplingGraph reference = cross_lattice_9();
  if (cross.n_sites != 9 || cross.edges != reference.edges)
    throw argument_error("sub_lattice requires the cross9 preset as base graph");
  if (n_active < 1 || n_active > 9)
    throw argument_error("n_active must be in [1, 9], got " + std::to_string(n_active));
  if (n_active == 9) return cross;
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : cross.edges)
    if (e.first < n_active && e.second < n_active) edges.push_back(e);
  CouplingGraph g = make_graph(n_active, std::move(edges));
  g.labels.assign(cross.labels.begin(), cross.labels.begin() + n_active);
  if (!cross.positions.empty())
    g.positions.assign(cross.positions.begin(), cross.positions.begin() + n_active);
  return g;
}

Bipartition two_coloring(const CouplingGraph& graph) {
  const int n = graph.n_sites;
  std::vector<std::vector<int>> adjacency(n);
  for (const auto& [a, b] : graph.edges) {
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  }
  for (auto& nbrs : adjacency) std::sort(nbrs.begin(), nbrs.end());

  constexpr int kUncolored = -1, kColorB = 0, kColorA = 1;
  std::vector<int> color(n, kUncolored), parent(n, -1);
  for (int root = 0; root < n; ++root) {
    if (color[root] != kUncolored) continue;
    color[root] = kColorB;
    std::deque<int> queue{root};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adjacency[u]) {
        if (color[v] == kUncolored) {
          color[v] = 1 - color[u];
          parent[v] = u;
          queue.push_back(v);
        } else if (color[v] == color[u]) {
          // Reconstruct the odd cycle through this conflicting edge.
          std::vector<int> pu{u}, pv{v};
          for (int x = u; parent[x] != -1; x = parent[x]) pu.push_back(parent[x]);
          for (int x = v; parent[x] != -1; x = parent[x]) pv.push_back(parent[x]);
          int i = static_cast<int>(pu.size()) - 1, j = static_cast<int>(pv.size()) - 1;
          while (i > 0 && j > 0 && pu[i - 1] == pv[j - 1]) { --i; --j; }
          std::string cycle;
          for (int k = 0; k <= i; ++k) cycle += std::to_string(pu[k]) + " ";
          for (int k = j; k >= 0; --k) cycle += std::to_string(pv[k]) + (k ? " " : "");
          throw argument_error("graph is not bipartite; odd cycle: " + cycle);
        }
      }
    }
  }
  Bipartition bp;
  for (int i = 0; i < n; ++i) (color[i] == kColorA ? bp.color_a : bp.color_b).push_back(i);
  return bp;
}

HamiltonianTerms make_terms(const CouplingGraph& graph, double coupling_mhz,
                            const Eigen::VectorXd& detunings_mhz) {
  if (detunings_mhz.size() != graph.n_sites)
    throw argument_error("detunings length does not match site count");
  HamiltonianTerms terms;
  terms.detunings = detunings_mhz.unaryExpr([](double f) { return omega_from_mhz(f); });
  terms.couplings.assign(graph.edges.size(), omega_from_mhz(coupling_mhz));
  validate_terms(graph, terms);
  return terms;
}

HamiltonianTerms zero_detuning_terms(const CouplingGraph& graph, double coupling_mhz) {
  return make_terms(graph, coupling_mhz, Eigen::VectorXd::Zero(graph.n_sites));
}

void validate_terms(const CouplingGraph& graph, const HamiltonianTerms& terms) {
  if (terms.detunings.size() != graph.n_sites)
    throw argument_error("terms.detunings length " + std::to_string(terms.detunings.size()) +
                         " does not match n_sites " + std::to_string(graph.n_sites));
  if (terms.couplings.size() != graph.edges.size())
    throw argument_error("terms.couplings length does not match edge count");
  if (!terms.detunings.allFinite()) throw argument_error("detunings must be finite");
  for (double j : terms.couplings)
    if (!std::isfinite(j)) throw argument_error("couplings must be finite");
}

Eigen::MatrixXd build_hamiltonian(const CouplingGraph& graph, const HamiltonianTerms& terms) {
  validate_terms(graph, terms);
  const int n = graph.n_sites;
  const Eigen::Index dim = Eigen::Index(1) << n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    double diag = 0.0;
    for (int site = 0; site < n; ++site) {
      const bool excited = static_cast<std::uint32_t>(idx) & site_bit_mask(n, site);
      diag += 0.5 * terms.detunings[site] * (excited ? -1.0 : 1.0);
    }
    h(idx, idx) = diag;
  }
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto [a, b] = graph.edges[e];
    const std::uint32_t ma = site_bit_mask(n, a), mb = site_bit_mask(n, b);
    const double j = terms.couplings[e];
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
      const auto u = static_cast<std::uint32_t>(idx);
      if ((u & ma) && !(u & mb)) {
        const Eigen::Index partner = static_cast<Eigen::Index>(u ^ ma ^ mb);
        h(partner, idx) += j;
        h(idx, partner) += j;
      }
    }
  }
  return h;
}

NegationReport verify_negation(const CouplingGraph& graph, const HamiltonianTerms& terms,
                               const Bipartition& bipartition) {
  const int n = graph.n_sites;
  std::uint32_t mask = 0;
  for (int site : bipartition.color_a) {
    if (site < 0 || site >= n) throw argument_error("bipartition site out of range");
    mask |= site_bit_mask(n, site);
  }
  const Eigen::MatrixXd h = build_hamiltonian(graph, terms);
  const Eigen::Index dim = h.rows();
  Eigen::VectorXd sign(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    sign[i] = (std::popcount(static_cast<std::uint32_t>(i) & mask) & 1) ? -1.0 : 1.0;
  double residual = 0.0;
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r)
      residual = std::max(residual, std::abs(sign[r] * h(r, c) * sign[c] + h(r, c)));
  NegationReport report;
  report.max_residual = residual;
  report.exact_negation = residual <= 1e-12 && terms.detunings.isZero(0.0);
  return report;
}

}  // namespace bfm
