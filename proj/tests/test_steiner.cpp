#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "qrst/steiner_dst.hpp"
#include "support.hpp"

using namespace qrst;

namespace {

bool tree_is_valid(const Digraph& g, Vertex root, const VertexSet& xs, const VertexSet& witness,
                   TreeDirection dir = TreeDirection::out) {
  VertexSet keep = set_union(set_union(xs, witness), VertexSet{root});
  std::vector<char> allowed(static_cast<std::size_t>(g.size()), 0);
  for (Vertex v : keep) allowed[v] = 1;
  auto seen = reach_mask(g, root, allowed, dir == TreeDirection::in);
  for (Vertex x : xs)
    if (!seen[x]) return false;
  return true;
}

}  // namespace

TEST(SteinerOut, EmptyTerminalSet) {
  DstResult r = steiner_out(Digraph(3), 0, {});
  EXPECT_EQ(r.cost, 0);
  EXPECT_TRUE(r.witness.empty());
}

TEST(SteinerOut, AdjacentTerminalIsFree) { EXPECT_EQ(steiner_out(Digraph(2, {{0, 1}}), 0, {1}).cost, 0); }

TEST(SteinerOut, SharedRelay) {
  DstResult r = steiner_out(Digraph(4, {{0, 2}, {2, 1}, {2, 3}}), 0, {1, 3});
  EXPECT_EQ(r.cost, 1);
  EXPECT_EQ(r.witness, (VertexSet{2}));
}

TEST(SteinerOut, UnreachableTerminal) { EXPECT_FALSE(steiner_out(Digraph(2, {{1, 0}}), 0, {1}).feasible()); }

TEST(SteinerOut, TerminalsRelayForFree) {
  // 0 -> 1 -> 2 -> 3 with X = {1, 3}: vertex 2 is the only paid relay.
  DstResult r = steiner_out(Digraph(4, {{0, 1}, {1, 2}, {2, 3}}), 0, {1, 3});
  EXPECT_EQ(r.cost, 1);
  EXPECT_EQ(r.witness, (VertexSet{2}));
}

TEST(SteinerOut, RootInsideTerminalSetIsIgnored) {
  EXPECT_EQ(steiner_out(Digraph(2, {{0, 1}}), 0, {0, 1}).cost, 0);
}

TEST(SteinerOut, GuardsTerminalCount) {
  Digraph g(kMaxDstTerminals + 2);
  VertexSet xs;
  for (Vertex v = 1; v <= kMaxDstTerminals + 1; ++v) xs.push_back(v);
  EXPECT_THROW(steiner_out(g, 0, xs), GuardError);
}

TEST(SteinerIn, Examples) {
  EXPECT_EQ(steiner_in(Digraph(3), 0, {}).cost, 0);
  EXPECT_EQ(steiner_in(Digraph(3, {{1, 0}, {2, 0}}), 0, {1, 2}).cost, 0);
  DstResult r = steiner_in(Digraph(4, {{1, 2}, {3, 2}, {2, 0}}), 0, {1, 3});
  EXPECT_EQ(r.cost, 1);
  EXPECT_EQ(r.witness, (VertexSet{2}));
}

TEST(SteinerOut, ExhaustiveCatalogUpToFiveVertices) {
  // Every digraph on n <= 4 vertices, every root and every |X| <= 2.
  for (int n = 1; n <= 4; ++n) {
    std::vector<Arc> pairs;
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = 0; v < n; ++v)
        if (u != v) pairs.push_back({u, v});
    for (std::uint32_t pick = 0; pick < (1u << pairs.size()); ++pick) {
      std::vector<Arc> arcs;
      for (std::size_t i = 0; i < pairs.size(); ++i)
        if (pick >> i & 1u) arcs.push_back(pairs[i]);
      Digraph g(n, arcs);
      for (Vertex root = 0; root < n; ++root)
        for (std::uint32_t xm = 0; xm < (1u << n); ++xm) {
          if (std::popcount(xm) > 2 || (xm >> root & 1u)) continue;
          VertexSet xs;
          for (Vertex v = 0; v < n; ++v)
            if (xm >> v & 1u) xs.push_back(v);
          ASSERT_EQ(steiner_out(g, root, xs).cost, reference::dst(g, root, xs));
        }
    }
  }
}

TEST(SteinerOut, MatchesReferenceOnRandomGraphs) {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 150; ++round) {
    int n = 4 + static_cast<int>(rng() % 6);
    Digraph g = reference::random_digraph(rng, n, 0.15 + 0.1 * static_cast<double>(round % 3));
    Vertex root = static_cast<Vertex>(rng() % static_cast<std::uint64_t>(n));
    VertexSet xs = reference::random_subset(rng, n, 1 + round % 3, {root});
    DstResult r = steiner_out(g, root, xs);
    ASSERT_EQ(r.cost, reference::dst(g, root, xs)) << "round " << round;
    if (r.feasible()) {
      EXPECT_EQ(static_cast<int>(r.witness.size()), *r.cost);
      EXPECT_TRUE(tree_is_valid(g, root, xs, r.witness));
    }
  }
}

// Dropping a terminal can raise the cost, since terminals relay for free, but
// by at most one: the dropped vertex becomes a paid relay.
TEST(SteinerOut, DroppingTerminalCostsAtMostOne) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 80; ++round) {
    Digraph g = reference::random_digraph(rng, 9, 0.25);
    VertexSet xs = reference::random_subset(rng, 9, 4, {0});
    VertexSet sub = xs;
    sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(rng() % sub.size()));
    int big = steiner_out(g, 0, xs).cost.value_or(kInfinity);
    int small = steiner_out(g, 0, sub).cost.value_or(kInfinity);
    EXPECT_LE(small, big == kInfinity ? kInfinity : big + 1);
  }
}

TEST(SteinerIn, DualToReversedOut) {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 80; ++round) {
    Digraph g = reference::random_digraph(rng, 9, 0.25);
    VertexSet ys = reference::random_subset(rng, 9, 3, {4});
    DstResult in = steiner_in(g, 4, ys);
    EXPECT_EQ(in.cost, steiner_out(reverse(g), 4, ys).cost);
    if (in.feasible()) {
      EXPECT_TRUE(tree_is_valid(g, 4, ys, in.witness, TreeDirection::in));
    }
  }
}

TEST(SteinerCosts, AllRootsAgreeWithSingleQueries) {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 30; ++round) {
    Digraph g = reference::random_digraph(rng, 8, 0.3);
    VertexSet xs = reference::random_subset(rng, 8, 3);
    auto row = steiner_costs_all_roots(g, xs);
    for (Vertex r = 0; r < 8; ++r) {
      VertexSet rest = xs;
      std::erase(rest, r);
      EXPECT_EQ(row[r], steiner_out(g, r, rest).cost.value_or(kInfinity));
    }
  }
}

TEST(SteinerCache, CountsHitsAndMatchesFreshSolve) {
  Digraph g(4, {{0, 2}, {2, 1}, {2, 3}});
  SteinerCache cache(g);
  EXPECT_EQ(cache.cost(0, {1, 3}), 1);
  EXPECT_EQ(cache.misses(), 1u);
  EXPECT_EQ(cache.cost(0, {3, 1}), 1);
  EXPECT_EQ(cache.hits(), 1u);
  EXPECT_EQ(cache.misses(), 1u);
  // A different root with the same terminal set shares the entry.
  EXPECT_EQ(cache.cost(2, {1, 3}), 0);
  EXPECT_EQ(cache.misses(), 1u);
  cache.clear();
  EXPECT_EQ(cache.cost(0, {1, 3}), 1);
  EXPECT_EQ(cache.misses(), 2u);
  EXPECT_EQ(cache.value(1, std::vector<Vertex>{0}), std::nullopt);
}

TEST(SteinerCache, DifferentialAgainstUncached) {
  std::mt19937_64 rng(99);
  Digraph g = reference::random_digraph(rng, 10, 0.2);
  SteinerCache cache(g);
  for (int round = 0; round < 200; ++round) {
    Vertex root = static_cast<Vertex>(rng() % 10);
    VertexSet xs = reference::random_subset(rng, 10, 1 + round % 3);
    EXPECT_EQ(cache.cost(root, xs), steiner_out(g, root, xs).cost.value_or(kInfinity));
  }
}

TEST(SteinerCache, ConcurrentReadersSeeEqualValues) {
  std::mt19937_64 rng(7);
  Digraph g = reference::random_digraph(rng, 10, 0.25);
  SteinerCache cache(g);
  std::vector<std::vector<int>> seen(4);
  std::vector<std::thread> workers;
  for (int w = 0; w < 4; ++w)
    workers.emplace_back([&, w] {
      for (Vertex r = 0; r < 10; ++r)
        for (Vertex a = 0; a < 10; ++a) seen[w].push_back(cache.cost(r, {a, (a + 3) % 10}));
    });
  for (auto& t : workers) t.join();
  for (int w = 1; w < 4; ++w) EXPECT_EQ(seen[w], seen[0]);
}
