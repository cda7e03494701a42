#pragma once

// Exhaustive ground truth. Kept deliberately naive: subsets of V \ (R ∪ T) in
// increasing size, lexicographic within a size, each checked with verify().

#include <optional>
#include <string>
#include <vector>

#include "qrst/error.hpp"
#include "qrst/graph.hpp"

namespace qrst {

inline constexpr int kMaxOracleCandidates = 18;

struct OracleResult {
  int opt = 0;
  VertexSet steiner_set;
};

namespace detail {

inline VertexSet oracle_candidates(const Instance& inst) {
  inst.validate();
  VertexSet fixed = set_union(inst.roots, inst.terminals);
  VertexSet cand;
  for (Vertex v = 0; v < inst.graph.size(); ++v)
    if (!contains(fixed, v)) cand.push_back(v);
  if (cand.size() > static_cast<std::size_t>(kMaxOracleCandidates))
    throw GuardError("brute force over " + std::to_string(cand.size()) + " candidate vertices exceeds limit " +
                     std::to_string(kMaxOracleCandidates));
  return cand;
}

/// First subset of size k (lexicographic) passing verify, if any.
inline std::optional<VertexSet> first_solution_of_size(const Instance& inst, const VertexSet& cand, int k) {
  const int n = static_cast<int>(cand.size());
  if (k > n) return std::nullopt;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[i] = i;
  VertexSet s(static_cast<std::size_t>(k));
  while (true) {
    for (int i = 0; i < k; ++i) s[i] = cand[idx[i]];
    if (verify(inst, s)) return s;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return std::nullopt;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// Minimum |S| for the instance's variant, or nullopt when even S = V \ (R ∪ T) fails.
inline std::optional<OracleResult> brute_force(const Instance& inst) {
  VertexSet cand = detail::oracle_candidates(inst);
  for (int k = 0; k <= static_cast<int>(cand.size()); ++k)
    if (auto s = detail::first_solution_of_size(inst, cand, k)) return OracleResult{k, std::move(*s)};
  return std::nullopt;
}

/// Is there a solution of size at most `budget`?
inline bool brute_force_decision(const Instance& inst, int budget) {
  if (budget < 0) return false;
  VertexSet cand = detail::oracle_candidates(inst);
  for (int k = 0; k <= std::min(budget, static_cast<int>(cand.size())); ++k)
    if (detail::first_solution_of_size(inst, cand, k)) return true;
  return false;
}

inline bool brute_force_decision(const Instance& inst) {
  if (!inst.budget) throw InvalidArgument("instance has no budget");
  return brute_force_decision(inst, *inst.budget);
}

}  // namespace qrst
