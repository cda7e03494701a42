#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qrst/error.hpp"

namespace qrst {

using Vertex = int;

/// Sorted, duplicate-free list of vertex ids.
using VertexSet = std::vector<Vertex>;

inline VertexSet make_set(std::vector<Vertex> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

inline bool contains(const VertexSet& set, Vertex v) {
  return std::binary_search(set.begin(), set.end(), v);
}

inline VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline VertexSet set_intersection(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

struct Arc {
  Vertex from = 0;
  Vertex to = 0;

  friend auto operator<=>(const Arc&, const Arc&) = default;
};

/// Immutable directed graph on vertices 0..n-1 without self-loops or parallel arcs.
///
/// Loops and duplicates handed to the constructor are dropped and counted, so a
/// parser can report them.
class Digraph {
 public:
  Digraph() = default;

  explicit Digraph(int n) : n_(n), out_(static_cast<std::size_t>(n)), in_(static_cast<std::size_t>(n)) {
    if (n < 0) throw InvalidArgument("negative vertex count");
  }

  Digraph(int n, std::span<const Arc> arcs) : Digraph(n) {
    arcs_.reserve(arcs.size());
    for (const Arc& a : arcs) {
      check(a.from);
      check(a.to);
      if (a.from == a.to) {
        ++dropped_loops_;
        continue;
      }
      arcs_.push_back(a);
    }
    std::sort(arcs_.begin(), arcs_.end());
    auto last = std::unique(arcs_.begin(), arcs_.end());
    dropped_duplicates_ = static_cast<int>(arcs_.end() - last);
    arcs_.erase(last, arcs_.end());
    for (const Arc& a : arcs_) {
      out_[a.from].push_back(a.to);
      in_[a.to].push_back(a.from);
    }
    for (auto& list : in_) std::sort(list.begin(), list.end());
  }

  Digraph(int n, std::initializer_list<Arc> arcs) : Digraph(n, std::span<const Arc>(arcs.begin(), arcs.size())) {}

  int size() const { return n_; }
  int arc_count() const { return static_cast<int>(arcs_.size()); }
  const std::vector<Arc>& arcs() const { return arcs_; }

  std::span<const Vertex> out(Vertex v) const { return out_[check(v)]; }
  std::span<const Vertex> in(Vertex v) const { return in_[check(v)]; }

  bool has_arc(Vertex u, Vertex v) const {
    auto o = out(u);
    return std::binary_search(o.begin(), o.end(), v);
  }

  bool valid(Vertex v) const { return v >= 0 && v < n_; }

  int dropped_loops() const { return dropped_loops_; }
  int dropped_duplicates() const { return dropped_duplicates_; }

  friend bool operator==(const Digraph& a, const Digraph& b) { return a.n_ == b.n_ && a.arcs_ == b.arcs_; }

 private:
  std::size_t check(Vertex v) const {
    if (!valid(v)) throw InvalidArgument("vertex id " + std::to_string(v) + " out of range");
    return static_cast<std::size_t>(v);
  }

  int n_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::vector<Vertex>> out_;
  std::vector<std::vector<Vertex>> in_;
  int dropped_loops_ = 0;
  int dropped_duplicates_ = 0;
};

inline Digraph reverse(const Digraph& g) {
  std::vector<Arc> arcs;
  arcs.reserve(g.arcs().size());
  for (const Arc& a : g.arcs()) arcs.push_back({a.to, a.from});
  return Digraph(g.size(), arcs);
}

/// Subgraph on `keep` with every arc whose endpoints both lie in `keep`. Ids are preserved.
inline Digraph induced(const Digraph& g, const VertexSet& keep) {
  std::vector<char> in_set(static_cast<std::size_t>(g.size()), 0);
  for (Vertex v : keep) {
    if (!g.valid(v)) throw InvalidArgument("vertex id " + std::to_string(v) + " out of range");
    in_set[v] = 1;
  }
  std::vector<Arc> arcs;
  for (const Arc& a : g.arcs())
    if (in_set[a.from] && in_set[a.to]) arcs.push_back(a);
  return Digraph(g.size(), arcs);
}

/// Vertices reachable from `source`, restricted to vertices with `allowed[v] != 0`
/// (an empty mask allows everything). The source is always included.
inline std::vector<char> reach_mask(const Digraph& g, Vertex source, std::span<const char> allowed = {},
                                    bool backward = false) {
  std::vector<char> seen(static_cast<std::size_t>(g.size()), 0);
  std::vector<Vertex> stack{source};
  seen[source] = 1;
  while (!stack.empty()) {
    Vertex u = stack.back();
    stack.pop_back();
    for (Vertex w : backward ? g.in(u) : g.out(u)) {
      if (seen[w] || (!allowed.empty() && !allowed[w])) continue;
      seen[w] = 1;
      stack.push_back(w);
    }
  }
  return seen;
}

inline VertexSet reachable_from(const Digraph& g, Vertex v) {
  if (!g.valid(v)) throw InvalidArgument("vertex id " + std::to_string(v) + " out of range");
  auto seen = reach_mask(g, v);
  VertexSet out;
  for (Vertex u = 0; u < g.size(); ++u)
    if (seen[u]) out.push_back(u);
  return out;
}

enum class Variant { unrestricted, pedestal, trunk };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::unrestricted: return "unrestricted";
    case Variant::pedestal: return "pedestal";
    case Variant::trunk: return "trunk";
  }
  return "?";
}

inline std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "unrestricted") return Variant::unrestricted;
  if (s == "pedestal") return Variant::pedestal;
  if (s == "trunk") return Variant::trunk;
  return std::nullopt;
}

struct Instance {
  Digraph graph;
  VertexSet roots;
  VertexSet terminals;
  std::optional<int> budget;
  Variant variant = Variant::unrestricted;

  /// Throws InvalidArgument when ids are out of range, R is empty, or a pedestal
  /// instance has R and T overlapping.
  void validate() const {
    if (roots.empty()) throw InvalidArgument("root set is empty");
    for (const VertexSet* s : {&roots, &terminals}) {
      if (!std::is_sorted(s->begin(), s->end()) || std::adjacent_find(s->begin(), s->end()) != s->end())
        throw InvalidArgument("vertex set not canonical");
      for (Vertex v : *s)
        if (!graph.valid(v)) throw InvalidArgument("vertex id " + std::to_string(v) + " out of range");
    }
    if (budget && *budget < 0) throw InvalidArgument("negative budget");
    if (variant == Variant::pedestal && !set_intersection(roots, terminals).empty())
      throw InvalidArgument("pedestal instance requires disjoint roots and terminals");
  }

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct Solution {
  VertexSet steiner_set;
  int size = 0;
  std::optional<Vertex> trunk_vertex;
};

struct VerifyResult {
  bool ok = false;
  /// A root/target pair without a path, when `ok` is false.
  std::optional<std::pair<Vertex, Vertex>> failure;
  /// The trunk vertex found, for the trunk variant.
  std::optional<Vertex> trunk;

  explicit operator bool() const { return ok; }
};

/// Checks the connectivity demand of `inst.variant` inside G[R ∪ S ∪ T].
inline VerifyResult verify(const Instance& inst, const VertexSet& s) {
  const Digraph& g = inst.graph;
  std::vector<char> allowed(static_cast<std::size_t>(g.size()), 0);
  for (const VertexSet* part : {&inst.roots, &inst.terminals, &s})
    for (Vertex v : *part) {
      if (!g.valid(v)) throw InvalidArgument("vertex id " + std::to_string(v) + " out of range");
      allowed[v] = 1;
    }

  VerifyResult result;
  std::vector<std::vector<char>> from_root;
  from_root.reserve(inst.roots.size());
  for (Vertex r : inst.roots) from_root.push_back(reach_mask(g, r, allowed));

  if (inst.variant != Variant::trunk) {
    for (std::size_t i = 0; i < inst.roots.size(); ++i) {
      for (Vertex t : inst.terminals)
        if (!from_root[i][t]) {
          result.failure = {inst.roots[i], t};
          return result;
        }
      if (inst.variant == Variant::pedestal)
        for (Vertex t : inst.roots)
          if (!from_root[i][t]) {
            result.failure = {inst.roots[i], t};
            return result;
          }
    }
    result.ok = true;
    return result;
  }

  for (Vertex v = 0; v < g.size(); ++v) {
    if (!allowed[v]) continue;
    bool all_reach = std::all_of(from_root.begin(), from_root.end(), [v](const auto& m) { return m[v] != 0; });
    if (!all_reach) continue;
    auto down = reach_mask(g, v, allowed);
    if (std::all_of(inst.terminals.begin(), inst.terminals.end(), [&](Vertex t) { return down[t] != 0; })) {
      result.ok = true;
      result.trunk = v;
      return result;
    }
  }
  return result;
}

}  // namespace qrst
