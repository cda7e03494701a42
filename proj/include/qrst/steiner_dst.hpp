#pragma once

// Exact vertex-counting Directed Steiner trees.
//
// ST(r, X) is the least |S| such that G[{r} ∪ X ∪ S] has a path from r to every
// x in X. The solver is the Dreyfus–Wagner subset recurrence run on arc-head
// weights: entering a vertex costs 1 unless it belongs to X. In an out-tree every
// non-root vertex is entered exactly once, so the tree weight is |S|. The
// recurrence costs O(3^|X| n + 2^|X| m log n), which is fine for the small
// terminal sets used here; a 2^|X| inclusion-exclusion routine would only improve
// the exponent.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <queue>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qrst/error.hpp"
#include "qrst/graph.hpp"

namespace qrst {

/// Cost value used for "no solution" inside cost tables.
inline constexpr int kInfinity = std::numeric_limits<int>::max() / 4;

/// Largest terminal set the subset DP accepts.
inline constexpr int kMaxDstTerminals = 20;

enum class TreeDirection {
  out,  ///< root reaches every terminal
  in,   ///< every terminal reaches the root
};

struct DstResult {
  std::optional<int> cost;
  VertexSet witness;

  bool feasible() const { return cost.has_value(); }
};

namespace detail {

inline void check_vertex(const Digraph& g, Vertex v) {
  if (!g.valid(v)) throw InvalidArgument("vertex id " + std::to_string(v) + " out of range");
}

/// Dreyfus–Wagner table for one terminal set, answering every root at once.
class DreyfusWagner {
 public:
  DreyfusWagner(const Digraph& g, VertexSet terminals, TreeDirection dir)
      : g_(g), terms_(std::move(terminals)), dir_(dir), n_(g.size()) {
    if (terms_.size() > static_cast<std::size_t>(kMaxDstTerminals))
      throw GuardError("Steiner terminal set of size " + std::to_string(terms_.size()) + " exceeds limit " +
                       std::to_string(kMaxDstTerminals));
    for (Vertex v : terms_) check_vertex(g_, v);
    k_ = static_cast<int>(terms_.size());
    run();
  }

  int terminal_count() const { return k_; }

  /// Min cost of a tree rooted at `root` spanning all terminals; kInfinity when none.
  int value(Vertex root) const {
    if (k_ == 0) return 0;
    return dp_[index(full(), root)];
  }

  std::vector<int> values() const {
    std::vector<int> out(static_cast<std::size_t>(n_), 0);
    if (k_ == 0) return out;
    for (Vertex v = 0; v < n_; ++v) out[v] = dp_[index(full(), v)];
    return out;
  }

  /// All vertices of an optimal tree rooted at `root`, root and terminals included.
  VertexSet tree(Vertex root) const {
    std::vector<Vertex> verts{root};
    if (k_ == 0 || value(root) >= kInfinity) return make_set(std::move(verts));
    std::vector<std::pair<std::uint32_t, Vertex>> stack{{full(), root}};
    while (!stack.empty()) {
      auto [mask, v] = stack.back();
      stack.pop_back();
      verts.push_back(v);
      std::int32_t how = how_[index(mask, v)];
      if (how == kBase) continue;
      if (how >= 0) {
        stack.emplace_back(mask, how);
      } else {
        auto sub = static_cast<std::uint32_t>(-how - 1);
        stack.emplace_back(sub, v);
        stack.emplace_back(mask ^ sub, v);
      }
    }
    return make_set(std::move(verts));
  }

 private:
  static constexpr std::int32_t kBase = -1;
  static constexpr std::int32_t kUnset = std::numeric_limits<std::int32_t>::min();

  std::uint32_t full() const { return (std::uint32_t{1} << k_) - 1; }
  std::size_t index(std::uint32_t mask, Vertex v) const {
    return static_cast<std::size_t>(mask) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v);
  }

  void run() {
    if (k_ == 0) return;
    std::size_t cells = (std::size_t{1} << k_) * static_cast<std::size_t>(n_);
    dp_.assign(cells, kInfinity);
    how_.assign(cells, kUnset);
    entry_cost_.assign(static_cast<std::size_t>(n_), 1);
    for (Vertex t : terms_) entry_cost_[t] = 0;

    for (std::uint32_t mask = 1; mask <= full(); ++mask) {
      if ((mask & (mask - 1)) == 0) {
        int i = std::countr_zero(mask);
        dp_[index(mask, terms_[i])] = 0;
        how_[index(mask, terms_[i])] = kBase;
      } else {
        std::uint32_t low = mask & (~mask + 1);
        for (std::uint32_t sub = (mask - 1) & mask; sub != 0; sub = (sub - 1) & mask) {
          if ((sub & low) == 0) continue;
          std::uint32_t rest = mask ^ sub;
          for (Vertex v = 0; v < n_; ++v) {
            int a = dp_[index(sub, v)];
            int b = dp_[index(rest, v)];
            if (a >= kInfinity || b >= kInfinity) continue;
            if (a + b < dp_[index(mask, v)]) {
              dp_[index(mask, v)] = a + b;
              how_[index(mask, v)] = -static_cast<std::int32_t>(sub) - 1;
            }
          }
        }
      }
      grow(mask);
    }
  }

  // Shortest-path closure: a tree rooted at u extends to a predecessor v of u at
  // the price of entering u.
  void grow(std::uint32_t mask) {
    using Item = std::pair<int, Vertex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (Vertex v = 0; v < n_; ++v)
      if (dp_[index(mask, v)] < kInfinity) heap.emplace(dp_[index(mask, v)], v);
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d != dp_[index(mask, u)]) continue;
      int cand = d + entry_cost_[u];
      for (Vertex v : dir_ == TreeDirection::out ? g_.in(u) : g_.out(u)) {
        if (cand < dp_[index(mask, v)]) {
          dp_[index(mask, v)] = cand;
          how_[index(mask, v)] = u;
          heap.emplace(cand, v);
        }
      }
    }
  }

  const Digraph& g_;
  VertexSet terms_;
  TreeDirection dir_;
  int n_;
  int k_ = 0;
  std::vector<int> dp_;
  std::vector<std::int32_t> how_;
  std::vector<int> entry_cost_;
};

inline DstResult solve_tree(const Digraph& g, Vertex root, std::span<const Vertex> terminals, TreeDirection dir) {
  check_vertex(g, root);
  VertexSet xs = make_set({terminals.begin(), terminals.end()});
  for (Vertex x : xs) check_vertex(g, x);
  std::erase(xs, root);
  if (xs.empty()) return {0, {}};
  DreyfusWagner dw(g, xs, dir);
  int cost = dw.value(root);
  if (cost >= kInfinity) return {std::nullopt, {}};
  VertexSet witness = dw.tree(root);
  std::erase(witness, root);
  witness = set_difference(witness, xs);
  if (static_cast<int>(witness.size()) != cost) throw InternalError("Steiner witness size mismatch");
  return {cost, std::move(witness)};
}

}  // namespace detail

/// ST(root, X): least number of extra vertices giving root a path to every x in X.
inline DstResult steiner_out(const Digraph& g, Vertex root, std::span<const Vertex> terminals) {
  return detail::solve_tree(g, root, terminals, TreeDirection::out);
}

inline DstResult steiner_out(const Digraph& g, Vertex root, std::initializer_list<Vertex> terminals) {
  return steiner_out(g, root, std::span<const Vertex>(terminals.begin(), terminals.size()));
}

/// STR(sink, Y): least number of extra vertices giving every y in Y a path to sink.
inline DstResult steiner_in(const Digraph& g, Vertex sink, std::span<const Vertex> sources) {
  return detail::solve_tree(g, sink, sources, TreeDirection::in);
}

inline DstResult steiner_in(const Digraph& g, Vertex sink, std::initializer_list<Vertex> sources) {
  return steiner_in(g, sink, std::span<const Vertex>(sources.begin(), sources.size()));
}

/// ST(r, X \ {r}) for every vertex r of the graph, from one table fill.
inline std::vector<int> steiner_costs_all_roots(const Digraph& g, const VertexSet& terminals,
                                                TreeDirection dir = TreeDirection::out) {
  return detail::DreyfusWagner(g, terminals, dir).values();
}

/// Memoized Steiner costs over a fixed graph.
///
/// Entries are keyed by the canonical terminal set; one fill answers every root,
/// so a query (root, X) shares its entry with (root', X). Readers may call
/// `cost` concurrently. The graph must outlive the cache.
class SteinerCache {
 public:
  explicit SteinerCache(const Digraph& g, TreeDirection dir = TreeDirection::out) : g_(g), dir_(dir) {}

  /// Cost or kInfinity.
  int cost(Vertex root, std::span<const Vertex> terminals) {
    detail::check_vertex(g_, root);
    VertexSet key = make_set({terminals.begin(), terminals.end()});
    std::erase(key, root);
    if (key.empty()) {
      hits_.fetch_add(1, std::memory_order_relaxed);
      return 0;
    }
    {
      std::shared_lock lock(mutex_);
      if (auto it = table_.find(key); it != table_.end()) {
        hits_.fetch_add(1, std::memory_order_relaxed);
        return it->second[root];
      }
    }
    std::vector<int> row = steiner_costs_all_roots(g_, key, dir_);
    misses_.fetch_add(1, std::memory_order_relaxed);
    int value = row[root];
    std::unique_lock lock(mutex_);
    table_.try_emplace(std::move(key), std::move(row));
    return value;
  }

  int cost(Vertex root, std::initializer_list<Vertex> terminals) {
    return cost(root, std::span<const Vertex>(terminals.begin(), terminals.size()));
  }

  std::optional<int> value(Vertex root, std::span<const Vertex> terminals) {
    int c = cost(root, terminals);
    if (c >= kInfinity) return std::nullopt;
    return c;
  }

  /// Full solve with witness; not memoized.
  DstResult solve(Vertex root, std::span<const Vertex> terminals) const {
    return detail::solve_tree(g_, root, terminals, dir_);
  }

  void clear() {
    std::unique_lock lock(mutex_);
    table_.clear();
  }

  const Digraph& graph() const { return g_; }
  std::size_t hits() const { return hits_.load(); }
  std::size_t misses() const { return misses_.load(); }

 private:
  struct KeyHash {
    std::size_t operator()(const VertexSet& s) const noexcept {
      std::size_t h = 1469598103934665603ull;
      for (Vertex v : s) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
      return h;
    }
  };

  const Digraph& g_;
  TreeDirection dir_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<VertexSet, std::vector<int>, KeyHash> table_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

}  // namespace qrst
