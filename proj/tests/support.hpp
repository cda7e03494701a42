#pragma once

// Reference implementations for differential tests. They share no code with the
// library beyond the Digraph/Instance containers: adjacency is rebuilt as
// bitmasks and every optimum is found by exhaustive subset enumeration.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "qrst/graph.hpp"
#include "qrst/io.hpp"

namespace qrst::reference {

using Mask = std::uint32_t;

inline Mask bit(Vertex v) { return Mask{1} << v; }

inline Mask mask_of(const VertexSet& s) {
  Mask m = 0;
  for (Vertex v : s) m |= bit(v);
  return m;
}

inline std::vector<Mask> successor_masks(const Digraph& g) {
  std::vector<Mask> out(static_cast<std::size_t>(g.size()), 0);
  for (const Arc& a : g.arcs()) out[a.from] |= bit(a.to);
  return out;
}

/// Vertices reachable from `src` using only vertices of `allowed` (src always allowed).
inline Mask closure(const std::vector<Mask>& succ, Vertex src, Mask allowed) {
  Mask seen = bit(src);
  Mask frontier = seen;
  while (frontier) {
    Mask next = 0;
    for (Mask f = frontier; f; f &= f - 1) next |= succ[std::countr_zero(f)];
    next &= allowed & ~seen;
    seen |= next;
    frontier = next;
  }
  return seen;
}

inline bool satisfies(const std::vector<Mask>& succ, Variant variant, Mask roots, Mask terms, Mask present) {
  if (variant == Variant::trunk) {
    for (Mask c = present; c; c &= c - 1) {
      Vertex v = std::countr_zero(c);
      bool in_all = true;
      for (Mask r = roots; r && in_all; r &= r - 1)
        in_all = (closure(succ, std::countr_zero(r), present) & bit(v)) != 0;
      if (in_all && (closure(succ, v, present) & terms) == terms) return true;
    }
    return false;
  }
  Mask need = variant == Variant::pedestal ? roots | terms : terms;
  for (Mask r = roots; r; r &= r - 1)
    if ((closure(succ, std::countr_zero(r), present) & need) != need) return false;
  return true;
}

/// Minimum |S| over every S ⊆ V \ (R ∪ T), by full 2^k enumeration.
inline std::optional<int> opt(const Instance& inst) {
  const auto succ = successor_masks(inst.graph);
  const Mask roots = mask_of(inst.roots);
  const Mask terms = mask_of(inst.terminals);
  std::vector<Vertex> free;
  for (Vertex v = 0; v < inst.graph.size(); ++v)
    if (!((roots | terms) & bit(v))) free.push_back(v);
  std::optional<int> best;
  for (Mask pick = 0; pick < (Mask{1} << free.size()); ++pick) {
    int size = std::popcount(pick);
    if (best && size >= *best) continue;
    Mask s = 0;
    for (Mask p = pick; p; p &= p - 1) s |= bit(free[std::countr_zero(p)]);
    if (satisfies(succ, inst.variant, roots, terms, roots | terms | s)) best = size;
  }
  return best;
}

/// Minimum |S| with S disjoint from {root} ∪ X such that root reaches all of X in G[{root} ∪ X ∪ S].
inline std::optional<int> dst(const Digraph& g, Vertex root, const VertexSet& xs) {
  const auto succ = successor_masks(g);
  Mask x = mask_of(xs) & ~bit(root);
  Mask base = x | bit(root);
  std::optional<int> best;
  for (Mask s = 0; s < (Mask{1} << g.size()); ++s) {
    if (s & base) continue;
    int size = std::popcount(s);
    if (best && size >= *best) continue;
    if ((closure(succ, root, base | s) & x) == x) best = size;
  }
  return best;
}

/// Cheapest chain f = c_0, c_1, ..., c_L = end through every ground vertex
/// (followed by `end` when external), every attached terminal hooked onto the
/// segment starting at some c_i with i < L: Σ ST(c_i, hooked(c_i) ∪ {c_{i+1}}).
inline std::optional<int> flip(const Digraph& g, Vertex f, const VertexSet& ground, Vertex end,
                                const VertexSet& attached, bool external_end) {
  std::vector<Vertex> middle;
  for (Vertex v : ground)
    if (v != f && (external_end || v != end)) middle.push_back(v);
  std::sort(middle.begin(), middle.end());
  std::optional<int> best;
  do {
    std::vector<Vertex> chain{f};
    chain.insert(chain.end(), middle.begin(), middle.end());
    if (external_end || end != f) chain.push_back(end);
    const int segments = static_cast<int>(chain.size()) - 1;
    if (segments == 0) {
      if (attached.empty()) best = 0;
      continue;
    }
    std::vector<int> assign(attached.size(), 0);
    while (true) {
      int total = 0;
      bool ok = true;
      for (int i = 0; i < segments && ok; ++i) {
        VertexSet xs{chain[i + 1]};
        for (std::size_t a = 0; a < attached.size(); ++a)
          if (assign[a] == i) xs.push_back(attached[a]);
        auto c = dst(g, chain[i], make_set(xs));
        if (!c) ok = false;
        else total += *c;
      }
      if (ok && (!best || total < *best)) best = total;
      std::size_t k = 0;
      while (k < assign.size() && ++assign[k] == segments) assign[k++] = 0;
      if (k == assign.size()) break;
    }
  } while (std::next_permutation(middle.begin(), middle.end()));
  return best;
}

/// Seeded instance stream for property tests.
inline Instance random_instance(std::uint64_t seed, int n, double p, int q, int t, Variant variant) {
  return gen_random({n, p, q, t, seed, variant});
}

inline Digraph random_digraph(std::mt19937_64& rng, int n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<Arc> arcs;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = 0; v < n; ++v)
      if (u != v && coin(rng)) arcs.push_back({u, v});
  return Digraph(n, arcs);
}

/// Distinct vertices drawn uniformly, returned sorted.
inline VertexSet random_subset(std::mt19937_64& rng, int n, int k, const VertexSet& avoid = {}) {
  std::vector<Vertex> pool;
  for (Vertex v = 0; v < n; ++v)
    if (!contains(avoid, v)) pool.push_back(v);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(static_cast<std::size_t>(std::min<int>(k, static_cast<int>(pool.size()))));
  return make_set(pool);
}

inline bool is_acyclic(const Digraph& g) {
  std::vector<int> indeg(static_cast<std::size_t>(g.size()), 0);
  for (const Arc& a : g.arcs()) ++indeg[a.to];
  std::vector<Vertex> ready;
  for (Vertex v = 0; v < g.size(); ++v)
    if (indeg[v] == 0) ready.push_back(v);
  int seen = 0;
  while (!ready.empty()) {
    Vertex v = ready.back();
    ready.pop_back();
    ++seen;
    for (Vertex w : g.out(v))
      if (--indeg[w] == 0) ready.push_back(w);
  }
  return seen == g.size();
}

}  // namespace qrst::reference
