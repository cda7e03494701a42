#pragma once

// Graph constructions used as instance generators:
//   * the Partitioned Subgraph Isomorphism -> 2-RST reduction (acyclic output,
//     |T| = 2|E_G|, budget 3|E_G| + |V_G|);
//   * the forking Y(G), which splits every vertex v into (v,0) and (v,1).

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qrst/error.hpp"
#include "qrst/graph.hpp"

namespace qrst {

struct UndirectedGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  friend bool operator==(const UndirectedGraph&, const UndirectedGraph&) = default;
};

/// Host graph H, pattern graph G and a colouring of V_H by V_G.
struct PsiInstance {
  UndirectedGraph host;
  UndirectedGraph pattern;
  std::vector<int> color;

  friend bool operator==(const PsiInstance&, const PsiInstance&) = default;
};

class EmptyPattern : public InvalidArgument {
 public:
  EmptyPattern() : InvalidArgument("pattern graph has no edges") {}
};

class DisconnectedPattern : public InvalidArgument {
 public:
  DisconnectedPattern() : InvalidArgument("pattern graph is not connected") {}
};

enum class VertexRole { root_vertex, root_edge, extra_root, host_vertex, host_edge, branch, terminal };

inline std::string_view to_string(VertexRole r) {
  switch (r) {
    case VertexRole::root_vertex: return "r_V";
    case VertexRole::root_edge: return "r_E";
    case VertexRole::extra_root: return "R";
    case VertexRole::host_vertex: return "V_H";
    case VertexRole::host_edge: return "E'";
    case VertexRole::branch: return "F";
    case VertexRole::terminal: return "T";
  }
  return "?";
}

struct RstReductionOutput {
  Instance instance;
  std::vector<VertexRole> roles;
  /// Human-readable name per vertex, e.g. "a_{0,3}" or "t_{1,2}".
  std::vector<std::string> names;
  int budget = 0;
  /// Host edges removed by normalization (colour pair not a pattern edge, or loops).
  int dropped_host_edges = 0;
};

namespace detail {

struct NormalizedPsi {
  int host_n = 0;
  int pattern_n = 0;
  std::vector<int> color;                      // by new host index
  std::vector<int> original;                   // new host index -> input id
  std::vector<std::pair<int, int>> host_edges;     // new indices, u < v
  std::vector<std::pair<int, int>> pattern_edges;  // i < j
  int dropped = 0;
};

inline std::pair<int, int> ordered(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

inline NormalizedPsi normalize(const PsiInstance& psi) {
  const int nh = psi.host.n;
  const int ng = psi.pattern.n;
  if (nh < 0 || ng < 0) throw InvalidArgument("negative vertex count");
  if (static_cast<int>(psi.color.size()) != nh) throw InvalidArgument("colouring must cover every host vertex");
  for (int c : psi.color)
    if (c < 0 || c >= ng) throw InvalidArgument("colour " + std::to_string(c) + " out of range");

  NormalizedPsi out;
  out.host_n = nh;
  out.pattern_n = ng;
  for (auto [i, j] : psi.pattern.edges) {
    if (i < 0 || j < 0 || i >= ng || j >= ng) throw InvalidArgument("pattern edge endpoint out of range");
    if (i != j) out.pattern_edges.push_back(ordered(i, j));
  }
  std::sort(out.pattern_edges.begin(), out.pattern_edges.end());
  out.pattern_edges.erase(std::unique(out.pattern_edges.begin(), out.pattern_edges.end()), out.pattern_edges.end());
  if (out.pattern_edges.empty()) throw EmptyPattern();

  std::vector<int> comp(static_cast<std::size_t>(ng));
  std::iota(comp.begin(), comp.end(), 0);
  auto find = [&comp](int x) {
    while (comp[x] != x) x = comp[x] = comp[comp[x]];
    return x;
  };
  for (auto [i, j] : out.pattern_edges) comp[find(i)] = find(j);
  for (int i = 1; i < ng; ++i)
    if (find(i) != find(0)) throw DisconnectedPattern();

  // Host vertices sorted by (colour, id) so that u < v implies col(u) <= col(v).
  out.original.resize(static_cast<std::size_t>(nh));
  std::iota(out.original.begin(), out.original.end(), 0);
  std::stable_sort(out.original.begin(), out.original.end(),
                   [&](int a, int b) { return psi.color[a] < psi.color[b]; });
  std::vector<int> relabel(static_cast<std::size_t>(nh));
  for (int i = 0; i < nh; ++i) relabel[out.original[i]] = i;
  out.color.resize(static_cast<std::size_t>(nh));
  for (int i = 0; i < nh; ++i) out.color[i] = psi.color[out.original[i]];

  for (auto [a, b] : psi.host.edges) {
    if (a < 0 || b < 0 || a >= nh || b >= nh) throw InvalidArgument("host edge endpoint out of range");
    auto [u, v] = ordered(relabel[a], relabel[b]);
    if (u == v || !std::binary_search(out.pattern_edges.begin(), out.pattern_edges.end(),
                                      ordered(out.color[u], out.color[v]))) {
      ++out.dropped;
      continue;
    }
    out.host_edges.emplace_back(u, v);
  }
  std::sort(out.host_edges.begin(), out.host_edges.end());
  auto last = std::unique(out.host_edges.begin(), out.host_edges.end());
  out.dropped += static_cast<int>(out.host_edges.end() - last);
  out.host_edges.erase(last, out.host_edges.end());
  return out;
}

}  // namespace detail

/// Builds the 2-RST instance (G', {r_V, r_E}, T, k'). With `roots > 2` the extra
/// roots each get a single arc to r_V.
inline RstReductionOutput psi_to_rst(const PsiInstance& psi, int roots = 2) {
  if (roots < 2) throw InvalidArgument("the reduction needs at least two roots");
  detail::NormalizedPsi np = detail::normalize(psi);
  const int nh = np.host_n;
  const int eh = static_cast<int>(np.host_edges.size());
  const int eg = static_cast<int>(np.pattern_edges.size());
  const int extra = roots - 2;

  const int root_v = 0;
  const int root_e = 1;
  const int host_base = 2 + extra;
  const int edge_base = host_base + nh;
  const int branch_base = edge_base + eh;
  const int term_base = branch_base + 2 * eh;
  const int total = term_base + 2 * eg;

  RstReductionOutput out;
  out.roles.assign(static_cast<std::size_t>(total), VertexRole::terminal);
  out.names.assign(static_cast<std::size_t>(total), "");
  out.roles[root_v] = VertexRole::root_vertex;
  out.names[root_v] = "r_V";
  out.roles[root_e] = VertexRole::root_edge;
  out.names[root_e] = "r_E";

  std::vector<Arc> arcs;
  VertexSet root_set{root_v, root_e};
  for (int i = 0; i < extra; ++i) {
    out.roles[2 + i] = VertexRole::extra_root;
    out.names[2 + i] = "r_" + std::to_string(i + 3);
    root_set.push_back(2 + i);
    arcs.push_back({2 + i, root_v});
  }
  for (int u = 0; u < nh; ++u) {
    out.roles[host_base + u] = VertexRole::host_vertex;
    out.names[host_base + u] = "h" + std::to_string(np.original[u]);
    arcs.push_back({root_v, host_base + u});
  }

  // Terminal t_{i,j} sits at term_base + 2 * (pattern edge index) + (i > j).
  auto terminal = [&](int i, int j) {
    auto it = std::lower_bound(np.pattern_edges.begin(), np.pattern_edges.end(), detail::ordered(i, j));
    return term_base + 2 * static_cast<int>(it - np.pattern_edges.begin()) + (i > j ? 1 : 0);
  };
  VertexSet terminals;
  for (int e = 0; e < eg; ++e) {
    auto [i, j] = np.pattern_edges[e];
    for (int side = 0; side < 2; ++side) {
      int t = term_base + 2 * e + side;
      out.roles[t] = VertexRole::terminal;
      out.names[t] = side == 0 ? "t_{" + std::to_string(i) + "," + std::to_string(j) + "}"
                               : "t_{" + std::to_string(j) + "," + std::to_string(i) + "}";
      terminals.push_back(t);
    }
  }

  for (int e = 0; e < eh; ++e) {
    auto [u, v] = np.host_edges[e];
    const int a = edge_base + e;
    const int b_uv = branch_base + 2 * e;
    const int b_vu = branch_base + 2 * e + 1;
    const std::string uv = std::to_string(np.original[u]) + "," + std::to_string(np.original[v]);
    const std::string vu = std::to_string(np.original[v]) + "," + std::to_string(np.original[u]);
    out.roles[a] = VertexRole::host_edge;
    out.names[a] = "a_{" + uv + "}";
    out.roles[b_uv] = VertexRole::branch;
    out.names[b_uv] = "b_{" + uv + "}";
    out.roles[b_vu] = VertexRole::branch;
    out.names[b_vu] = "b_{" + vu + "}";
    arcs.push_back({root_e, a});
    arcs.push_back({a, b_uv});
    arcs.push_back({a, b_vu});
    arcs.push_back({host_base + u, b_uv});
    arcs.push_back({host_base + v, b_vu});
    arcs.push_back({b_uv, terminal(np.color[u], np.color[v])});
    arcs.push_back({b_vu, terminal(np.color[v], np.color[u])});
  }

  out.budget = 3 * eg + np.pattern_n;
  out.dropped_host_edges = np.dropped;
  out.instance = Instance{Digraph(total, arcs), make_set(root_set), terminals, out.budget, Variant::unrestricted};
  return out;
}

/// Exhaustive PSI check: one host vertex per colour class, every pattern edge
/// realized by a host edge.
inline bool psi_brute(const PsiInstance& psi) {
  detail::NormalizedPsi np = detail::normalize(psi);
  if (np.host_n > 10) throw GuardError("psi_brute is limited to 10 host vertices");
  std::vector<std::vector<int>> classes(static_cast<std::size_t>(np.pattern_n));
  for (int u = 0; u < np.host_n; ++u) classes[np.color[u]].push_back(u);
  for (const auto& c : classes)
    if (c.empty()) return false;

  std::vector<std::size_t> pick(classes.size(), 0);
  while (true) {
    bool all = true;
    for (auto [i, j] : np.pattern_edges) {
      if (!std::binary_search(np.host_edges.begin(), np.host_edges.end(),
                              detail::ordered(classes[i][pick[i]], classes[j][pick[j]]))) {
        all = false;
        break;
      }
    }
    if (all) return true;
    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == classes[k].size()) pick[k++] = 0;
    if (k == pick.size()) return false;
  }
}

struct ForkResult {
  Digraph graph;
  VertexSet roots;
  VertexSet terminals;
};

/// Forking Y(G): (v,0) keeps id v, (v,1) gets id v + n; arcs (u,0)->(v,1) for
/// every arc (u,v) and (v,1)->(v,0) for every v.
inline ForkResult fork(const Digraph& g, const VertexSet& roots, const VertexSet& terminals) {
  const int n = g.size();
  std::vector<Arc> arcs;
  arcs.reserve(g.arcs().size() + static_cast<std::size_t>(n));
  for (const Arc& a : g.arcs()) arcs.push_back({a.from, a.to + n});
  for (Vertex v = 0; v < n; ++v) arcs.push_back({v + n, v});
  for (const VertexSet* part : {&roots, &terminals})
    for (Vertex v : *part)
      if (!g.valid(v)) throw InvalidArgument("vertex id " + std::to_string(v) + " out of range");
  return {Digraph(2 * n, arcs), roots, terminals};
}

}  // namespace qrst
