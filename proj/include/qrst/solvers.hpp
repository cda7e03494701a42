#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "qrst/error.hpp"
#include "qrst/graph.hpp"
#include "qrst/steiner_dst.hpp"
#include "qrst/token_game.hpp"

namespace qrst {

struct PedestalOptions {
  /// Root playing r0 in the game; defaults to the smallest root.
  std::optional<Vertex> r0;
  /// Receives the move trace when set.
  std::ostream* trace = nullptr;
};

/// Minimum S such that in G[R ∪ S ∪ T] every root reaches every vertex of R ∪ T.
///
/// One root is a plain Directed Steiner tree query; otherwise the value is the
/// shortest game cost minus one, with the game witness as solution.
inline std::optional<Solution> solve_rst_p(const Instance& inst, const PedestalOptions& opts = {}) {
  inst.validate();
  if (!set_intersection(inst.roots, inst.terminals).empty())
    throw InvalidArgument("pedestal solver requires disjoint roots and terminals");
  if (inst.roots.size() == 1) {
    DstResult r = steiner_out(inst.graph, inst.roots.front(), inst.terminals);
    if (!r.feasible()) return std::nullopt;
    return Solution{r.witness, *r.cost, std::nullopt};
  }
  Vertex r0 = opts.r0.value_or(inst.roots.front());
  auto game = shortest_game(inst.graph, inst.roots, inst.terminals, r0);
  if (!game) return std::nullopt;
  if (opts.trace) write_trace(*opts.trace, *game, inst.terminals);
  VertexSet s = extract_solution(*game, inst.graph, inst.roots, inst.terminals);
  if (static_cast<int>(s.size()) != game->cost - 1) throw InternalError("pedestal witness does not match game cost");
  return Solution{std::move(s), game->cost - 1, std::nullopt};
}

namespace detail {

/// Pedestal value only (no witness assembly).
inline std::optional<int> pedestal_value(const Digraph& g, const VertexSet& roots, const VertexSet& terminals) {
  if (roots.size() == 1) {
    DstResult r = steiner_out(g, roots.front(), terminals);
    return r.cost;
  }
  auto game = shortest_game(g, roots, terminals, roots.front());
  if (!game) return std::nullopt;
  return game->cost - 1;
}

struct TrunkChoice {
  int value = kInfinity;
  std::vector<Vertex> image;  // φ(r) for r in R order
};

/// Minimum over φ: R -> V of pedestal(φ(R), T \ φ(R)) + |φ(R) \ (R ∪ T)| + Σ STR(r', φ⁻¹(r')).
/// Ties keep the first φ in lexicographic order of images.
inline TrunkChoice best_trunk_mapping(const Instance& inst) {
  const Digraph& g = inst.graph;
  const int n = g.size();
  const int q = static_cast<int>(inst.roots.size());
  if (q > kMaxRoots)
    throw GuardError("root count " + std::to_string(q) + " exceeds limit " + std::to_string(kMaxRoots));
  const VertexSet fixed = set_union(inst.roots, inst.terminals);

  std::vector<std::vector<char>> reach;
  for (Vertex r : inst.roots) reach.push_back(reach_mask(g, r));

  SteinerCache in_cache(g, TreeDirection::in);
  std::map<VertexSet, std::optional<int>> pedestal_memo;
  TrunkChoice best;

  std::vector<Vertex> image(static_cast<std::size_t>(q), 0);
  while (true) {
    bool ok = true;
    for (int i = 0; i < q && ok; ++i) ok = reach[i][image[i]] != 0;
    if (ok) {
      VertexSet targets = make_set(image);
      int cost = static_cast<int>(set_difference(targets, fixed).size());
      for (Vertex t : targets) {
        std::vector<Vertex> fiber;
        for (int i = 0; i < q; ++i)
          if (image[i] == t) fiber.push_back(inst.roots[i]);
        cost += in_cache.cost(t, fiber);
        if (cost >= kInfinity) break;
      }
      if (cost < best.value) {
        auto it = pedestal_memo.find(targets);
        if (it == pedestal_memo.end())
          it = pedestal_memo.emplace(targets, pedestal_value(g, targets, set_difference(inst.terminals, targets))).first;
        if (it->second && cost + *it->second < best.value) {
          best.value = cost + *it->second;
          best.image = image;
        }
      }
    }
    int i = q - 1;
    while (i >= 0 && image[i] == n - 1) image[i--] = 0;
    if (i < 0) break;
    ++image[i];
  }
  return best;
}

}  // namespace detail

/// Minimum S such that G[R ∪ S ∪ T] has a vertex reached by every root and
/// reaching every terminal. The reported trunk vertex is the smallest root image.
inline std::optional<Solution> solve_rst_t(const Instance& inst) {
  inst.validate();
  auto choice = detail::best_trunk_mapping(inst);
  if (choice.value >= kInfinity) return std::nullopt;

  const Digraph& g = inst.graph;
  const VertexSet targets = make_set(choice.image);
  const VertexSet sub_terminals = set_difference(inst.terminals, targets);
  VertexSet all = targets;
  Instance sub{g, targets, sub_terminals, std::nullopt, Variant::pedestal};
  auto ped = solve_rst_p(sub);
  if (!ped) throw InternalError("trunk pedestal subproblem lost feasibility");
  all = set_union(all, ped->steiner_set);
  for (Vertex t : targets) {
    std::vector<Vertex> fiber;
    for (std::size_t i = 0; i < inst.roots.size(); ++i)
      if (choice.image[i] == t) fiber.push_back(inst.roots[i]);
    DstResult r = steiner_in(g, t, fiber);
    if (!r.feasible()) throw InternalError("trunk in-tree lost feasibility");
    all = set_union(all, r.witness);
  }
  VertexSet s = set_difference(all, set_union(inst.roots, inst.terminals));
  if (static_cast<int>(s.size()) != choice.value) throw InternalError("trunk witness does not match value");
  Instance check = inst;
  check.variant = Variant::trunk;
  if (!verify(check, s)) throw InternalError("trunk witness fails verification");
  return Solution{std::move(s), choice.value, targets.front()};
}

/// Optimal value for the instance's variant, without witness assembly.
inline std::optional<int> opt_value(const Instance& inst) {
  inst.validate();
  switch (inst.variant) {
    case Variant::pedestal:
      if (!set_intersection(inst.roots, inst.terminals).empty())
        throw InvalidArgument("pedestal solver requires disjoint roots and terminals");
      return detail::pedestal_value(inst.graph, inst.roots, inst.terminals);
    case Variant::trunk: {
      auto c = detail::best_trunk_mapping(inst);
      if (c.value >= kInfinity) return std::nullopt;
      return c.value;
    }
    case Variant::unrestricted:
      break;
  }
  throw InvalidArgument("no exact solver for the unrestricted variant; use the oracle");
}

/// Dispatches on the instance variant.
inline std::optional<Solution> solve(const Instance& inst, const PedestalOptions& opts = {}) {
  switch (inst.variant) {
    case Variant::pedestal: return solve_rst_p(inst, opts);
    case Variant::trunk: return solve_rst_t(inst);
    case Variant::unrestricted: break;
  }
  throw InvalidArgument("no exact solver for the unrestricted variant; use the oracle");
}

}  // namespace qrst
