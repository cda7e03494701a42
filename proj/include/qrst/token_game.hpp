#pragma once

// Accelerated token game for the pedestal variant.
//
// A configuration (F, B, D) places forward tokens F (walking along arcs toward
// r0), backward tokens B (walking against arcs away from r0) and keeps the
// unconsumed terminals D at their original positions. The cheapest move sequence
// from (R', R', T) to ({r0}, {r0}, ∅), with R' = R \ {r0}, costs exactly one
// more than the optimum, and the vertices paid for along the way form an
// optimal solution.
//
// Move costs:
//   3a  forward token u -> v along arc (u,v); 1 if v is unoccupied.
//   3b  backward token v -> u along arc (u,v), collecting D' ⊆ D at u;
//       ST(u, D' ∪ {v}) plus 1 if u is unoccupied.
//   4a  flip: forward tokens F' jump to b ∈ B', backward tokens B' and the
//       terminals D' jump to f ∈ F'; cost is the cheapest chain of Steiner
//       segments f = φ1 -> φ2 -> ... -> b visiting F' ∪ B', where each segment
//       start may also pick up some terminals of D'.
//   4b  as 4a, but the chain continues past F' ∪ B' to an arbitrary v ∉ B;
//       plus 1 if v is neither pending nor a forward token.
//   5   from ({r0}, {r0}, D): ST(r0, D).

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qrst/error.hpp"
#include "qrst/graph.hpp"
#include "qrst/steiner_dst.hpp"

namespace qrst {

inline constexpr int kMaxRoots = 6;
inline constexpr int kDefaultMaxTerminals = 16;
inline constexpr int kHardMaxTerminals = 30;

/// Terminal-count guard for the game; `RST_MAX_T` raises it up to kHardMaxTerminals.
inline int max_game_terminals() {
  if (const char* env = std::getenv("RST_MAX_T")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 0) return static_cast<int>(std::min<long>(v, kHardMaxTerminals));
  }
  return kDefaultMaxTerminals;
}

/// Bitmask over the index space of the terminal list.
using TerminalMask = std::uint32_t;

/// Sorted set of at most kMaxRoots token positions, stored inline.
class TokenSet {
 public:
  static constexpr int kCapacity = kMaxRoots;

  TokenSet() { items_.fill(-1); }

  static TokenSet of(std::span<const Vertex> vs) {
    TokenSet s;
    for (Vertex v : vs) s = s.with(v);
    return s;
  }
  static TokenSet of(std::initializer_list<Vertex> vs) { return of(std::span<const Vertex>(vs.begin(), vs.size())); }

  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  Vertex operator[](int i) const { return items_[static_cast<std::size_t>(i)]; }
  const Vertex* begin() const { return items_.data(); }
  const Vertex* end() const { return items_.data() + size_; }

  bool contains(Vertex v) const { return std::find(begin(), end(), v) != end(); }

  TokenSet with(Vertex v) const {
    if (contains(v)) return *this;
    if (size_ == kCapacity) throw InternalError("token set overflow");
    TokenSet out = *this;
    auto pos = std::lower_bound(out.items_.begin(), out.items_.begin() + size_, v);
    std::move_backward(pos, out.items_.begin() + size_, out.items_.begin() + size_ + 1);
    *pos = v;
    ++out.size_;
    return out;
  }

  TokenSet without(Vertex v) const {
    TokenSet out;
    for (Vertex x : *this)
      if (x != v) out.items_[out.size_++] = x;
    return out;
  }

  TokenSet minus(const TokenSet& other) const {
    TokenSet out;
    for (Vertex x : *this)
      if (!other.contains(x)) out.items_[out.size_++] = x;
    return out;
  }

  /// Elements whose index bit is set in `bits`.
  TokenSet pick(std::uint32_t bits) const {
    TokenSet out;
    for (int i = 0; i < size_; ++i)
      if (bits >> i & 1u) out.items_[out.size_++] = items_[static_cast<std::size_t>(i)];
    return out;
  }

  VertexSet to_set() const { return VertexSet(begin(), end()); }

  friend bool operator==(const TokenSet&, const TokenSet&) = default;
  friend auto operator<=>(const TokenSet& a, const TokenSet& b) {
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
  }

 private:
  std::array<Vertex, kCapacity> items_;
  std::uint8_t size_ = 0;
};

struct GameState {
  TokenSet forward;
  TokenSet backward;
  TerminalMask pending = 0;

  friend bool operator==(const GameState&, const GameState&) = default;
  friend auto operator<=>(const GameState&, const GameState&) = default;
};

struct GameStateHash {
  std::size_t operator()(const GameState& s) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t x) { h = (h ^ x) * 1099511628211ull; };
    for (Vertex v : s.forward) mix(static_cast<std::uint64_t>(v));
    mix(0xfffful);
    for (Vertex v : s.backward) mix(static_cast<std::uint64_t>(v));
    mix(s.pending);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

enum class MoveKind {
  forward_step,    // 3a
  backward_step,   // 3b
  flip,            // 4a
  flip_to_vertex,  // 4b
  finish,          // 5
};

inline std::string_view label(MoveKind k) {
  switch (k) {
    case MoveKind::forward_step: return "3a";
    case MoveKind::backward_step: return "3b";
    case MoveKind::flip: return "4a";
    case MoveKind::flip_to_vertex: return "4b";
    case MoveKind::finish: return "5";
  }
  return "?";
}

struct Move {
  MoveKind kind = MoveKind::forward_step;
  int cost = 0;
  /// Arc (tail, head) for single steps.
  Vertex tail = -1;
  Vertex head = -1;
  /// f for flips.
  Vertex anchor = -1;
  /// b for 4a, v for 4b.
  Vertex end = -1;
  TokenSet flipped_forward;
  TokenSet flipped_backward;
  /// D' (terminals consumed by the move, besides any landed on).
  TerminalMask consumed = 0;
  /// Vertices charged by the Steiner segments of the move; filled for moves
  /// returned by shortest_game.
  VertexSet witness;
};

struct Transition {
  Move move;
  GameState next;
};

/// Held-Karp table for type-4 costs around one anchor.
///
/// `ground[0]` is the anchor f. Entry (J, j, D'') is the cheapest chain starting
/// at f, visiting exactly the ground vertices in J and ending at ground[j], with
/// the universe-terminals in D'' attached to segment starts. J always contains
/// bit 0; (J = {f}, f, ∅) is the empty chain of cost 0.
///
/// `St` is called as st(root, universe_mask, extra) and returns ST(root, terminals
/// of universe_mask ∪ {extra}) or kInfinity.
template <class St>
class FlipTable {
 public:
  struct Segment {
    Vertex from;
    std::uint32_t terminals;
    Vertex to;
  };

  FlipTable(std::span<const Vertex> ground, int universe_size, const St& st)
      : ground_(ground.begin(), ground.end()), g_(static_cast<int>(ground.size())), u_(universe_size), st_(st) {
    if (g_ < 1 || g_ > 2 * kMaxRoots) throw InvalidArgument("flip ground set size out of range");
    if (u_ < 0 || u_ > kHardMaxTerminals) throw GuardError("flip terminal universe too large");
    std::size_t cells = (std::size_t{1} << (g_ - 1)) * static_cast<std::size_t>(g_) << u_;
    dp_.assign(cells, kInfinity);
    parent_j_.assign(cells, -1);
    parent_mask_.assign(cells, 0);
    dp_[index(1, 0, 0)] = 0;
    fill();
  }

  int ground_size() const { return g_; }
  int universe_size() const { return u_; }
  std::uint32_t universe_full() const { return (std::uint32_t{1} << u_) - 1; }

  /// Chain over J ending at ground[end]; end == 0 is only meaningful for J == {f}.
  int cost(std::uint32_t ground_bits, int end, std::uint32_t terminals) const {
    return dp_[index(ground_bits, end, terminals)];
  }

  /// Chain over J continued to an outside vertex v, for every D' ⊆ universe.
  std::vector<int> external_costs(std::uint32_t ground_bits, Vertex v) const {
    std::vector<int> best(std::size_t{1} << u_, kInfinity);
    std::vector<int> tail(std::size_t{1} << u_);
    for (int j = 0; j < g_; ++j) {
      if (!valid_end(ground_bits, j)) continue;
      for (std::uint32_t m = 0; m <= universe_full(); ++m) tail[m] = st_(ground_[static_cast<std::size_t>(j)], m, v);
      for (std::uint32_t d = 0; d <= universe_full(); ++d) {
        int acc = best[d];
        for (std::uint32_t bar = d;; bar = (bar - 1) & d) {
          int head = dp_[index(ground_bits, j, d ^ bar)];
          if (head < kInfinity && tail[bar] < kInfinity) acc = std::min(acc, head + tail[bar]);
          if (bar == 0) break;
        }
        best[d] = acc;
      }
    }
    return best;
  }

  std::vector<Segment> segments(std::uint32_t ground_bits, int end, std::uint32_t terminals) const {
    std::vector<Segment> out;
    if (cost(ground_bits, end, terminals) >= kInfinity) throw InternalError("no chain to reconstruct");
    while (ground_bits != 1u) {
      std::size_t at = index(ground_bits, end, terminals);
      int prev = parent_j_[at];
      std::uint32_t bar = parent_mask_[at];
      out.push_back({ground_[static_cast<std::size_t>(prev)], bar, ground_[static_cast<std::size_t>(end)]});
      ground_bits &= ~(1u << end);
      terminals ^= bar;
      end = prev;
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  std::vector<Segment> external_segments(std::uint32_t ground_bits, Vertex v, std::uint32_t terminals) const {
    int best = kInfinity;
    int best_j = -1;
    std::uint32_t best_bar = 0;
    for (int j = 0; j < g_; ++j) {
      if (!valid_end(ground_bits, j)) continue;
      for (std::uint32_t bar = terminals;; bar = (bar - 1) & terminals) {
        int head = dp_[index(ground_bits, j, terminals ^ bar)];
        int tail = head < kInfinity ? st_(ground_[static_cast<std::size_t>(j)], bar, v) : kInfinity;
        if (head < kInfinity && tail < kInfinity && head + tail < best) {
          best = head + tail;
          best_j = j;
          best_bar = bar;
        }
        if (bar == 0) break;
      }
    }
    if (best_j < 0) throw InternalError("no external chain to reconstruct");
    auto out = segments(ground_bits, best_j, terminals ^ best_bar);
    out.push_back({ground_[static_cast<std::size_t>(best_j)], best_bar, v});
    return out;
  }

 private:
  bool valid_end(std::uint32_t ground_bits, int j) const {
    if (!(ground_bits >> j & 1u)) return false;
    return j != 0 || ground_bits == 1u;
  }

  std::size_t index(std::uint32_t ground_bits, int j, std::uint32_t terminals) const {
    return (((static_cast<std::size_t>(ground_bits >> 1) * static_cast<std::size_t>(g_)) + static_cast<std::size_t>(j))
            << u_) |
           terminals;
  }

  void fill() {
    const std::uint32_t all = (std::uint32_t{1} << g_) - 1;
    std::vector<int> seg(std::size_t{1} << u_);
    for (std::uint32_t J = 3; J <= all; J += 2) {
      for (int j = 1; j < g_; ++j) {
        if (!(J >> j & 1u)) continue;
        const std::uint32_t rest = J & ~(1u << j);
        for (int jp = 0; jp < g_; ++jp) {
          if (!valid_end(rest, jp)) continue;
          for (std::uint32_t m = 0; m <= universe_full(); ++m)
            seg[m] = st_(ground_[static_cast<std::size_t>(jp)], m, ground_[static_cast<std::size_t>(j)]);
          for (std::uint32_t d = 0; d <= universe_full(); ++d) {
            std::size_t at = index(J, j, d);
            for (std::uint32_t bar = d;; bar = (bar - 1) & d) {
              int head = dp_[index(rest, jp, d ^ bar)];
              if (head < kInfinity && seg[bar] < kInfinity && head + seg[bar] < dp_[at]) {
                dp_[at] = head + seg[bar];
                parent_j_[at] = static_cast<std::int8_t>(jp);
                parent_mask_[at] = bar;
              }
              if (bar == 0) break;
            }
          }
        }
      }
    }
  }

  std::vector<Vertex> ground_;
  int g_;
  int u_;
  const St& st_;
  std::vector<int> dp_;
  std::vector<std::int8_t> parent_j_;
  std::vector<std::uint32_t> parent_mask_;
};

struct FlipCost {
  std::optional<int> cost;
  VertexSet witness;
};

/// Cost of a type-4 move in isolation.
///
/// The chain starts at f, visits every vertex of `ground` and ends at `end`:
/// for a 4a move `end` is a ground vertex (the chain's last stop); with
/// `external_end` the chain visits all of `ground` and then continues to `end`.
/// Each terminal of `attached` joins the segment starting at some chain vertex
/// other than the final stop. The 4b surcharge for a fresh endpoint is not
/// included. The witness is the union of the segment trees minus
/// ground ∪ attached ∪ {end}.
inline FlipCost flip_cost(const Digraph& g, Vertex f, const VertexSet& ground, Vertex end, const VertexSet& attached,
                          bool external_end) {
  for (Vertex v : ground) detail::check_vertex(g, v);
  for (Vertex v : attached) detail::check_vertex(g, v);
  detail::check_vertex(g, end);
  if (!contains(ground, f)) throw InvalidArgument("anchor must belong to the ground set");
  if (!external_end && !contains(ground, end)) throw InvalidArgument("chain end must belong to the ground set");
  if (!external_end && end == f && ground.size() > 1) throw InvalidArgument("chain cannot end at its anchor");
  if (attached.size() > static_cast<std::size_t>(kHardMaxTerminals)) throw GuardError("too many attached terminals");

  std::vector<Vertex> order{f};
  for (Vertex v : ground)
    if (v != f) order.push_back(v);

  SteinerCache cache(g);
  auto st = [&](Vertex root, std::uint32_t mask, Vertex extra) {
    std::vector<Vertex> xs{extra};
    for (std::size_t i = 0; i < attached.size(); ++i)
      if (mask >> i & 1u) xs.push_back(attached[i]);
    return cache.cost(root, xs);
  };
  FlipTable table(order, static_cast<int>(attached.size()), st);
  const std::uint32_t all_ground = (std::uint32_t{1} << order.size()) - 1;
  const std::uint32_t all_attached = table.universe_full();

  using Seg = typename decltype(table)::Segment;
  std::vector<Seg> segs;
  if (external_end) {
    int c = table.external_costs(all_ground, end)[all_attached];
    if (c >= kInfinity) return {};
    segs = table.external_segments(all_ground, end, all_attached);
  } else {
    int j = static_cast<int>(std::find(order.begin(), order.end(), end) - order.begin());
    if (table.cost(all_ground, j, all_attached) >= kInfinity) return {};
    segs = table.segments(all_ground, j, all_attached);
  }

  int total = 0;
  VertexSet witness;
  for (const Seg& s : segs) {
    std::vector<Vertex> xs{s.to};
    for (std::size_t i = 0; i < attached.size(); ++i)
      if (s.terminals >> i & 1u) xs.push_back(attached[i]);
    DstResult r = steiner_out(g, s.from, xs);
    if (!r.feasible()) throw InternalError("flip segment became infeasible");
    total += *r.cost;
    witness = set_union(witness, r.witness);
  }
  witness = set_difference(witness, set_union(set_union(ground, attached), VertexSet{end}));
  return {total, std::move(witness)};
}

struct GameResult {
  int cost = 0;
  std::vector<Move> moves;
  /// states[0] is the start configuration, states[i + 1] follows moves[i].
  std::vector<GameState> states;
  std::size_t settled_states = 0;
};

namespace detail {

/// Implicit game graph for one (G, T, r0): move enumeration with memoized costs.
class GameGraph {
 public:
  GameGraph(const Digraph& g, const VertexSet& terminals, Vertex r0)
      : g_(g), terminals_(terminals), r0_(r0), n_(g.size()), t_(static_cast<int>(terminals.size())) {
    check_vertex(g, r0);
    if (t_ > max_game_terminals())
      throw GuardError("terminal count " + std::to_string(t_) + " exceeds limit " +
                       std::to_string(max_game_terminals()) + " (set RST_MAX_T to raise it)");
    terminal_index_.assign(static_cast<std::size_t>(n_), -1);
    for (int i = 0; i < t_; ++i) {
      check_vertex(g, terminals[i]);
      terminal_index_[terminals[i]] = i;
    }
    to_root_ = reach_mask(g, r0, {}, true);
    from_root_ = reach_mask(g, r0);
    reach_.reserve(static_cast<std::size_t>(n_));
    for (Vertex v = 0; v < n_; ++v) reach_.push_back(reach_mask(g, v));
    std::size_t slots = static_cast<std::size_t>(n_ + 1) << t_;
    dense_ = slots <= (std::size_t{1} << 22);
    if (dense_) st_dense_.resize(slots);
  }

  const Digraph& graph() const { return g_; }
  const VertexSet& terminals() const { return terminals_; }
  Vertex r0() const { return r0_; }
  TerminalMask all_terminals() const { return t_ == 0 ? 0u : static_cast<TerminalMask>((std::uint64_t{1} << t_) - 1); }

  GameState target_state() const { return {TokenSet::of({r0_}), TokenSet::of({r0_}), 0}; }

  bool is_pending(const GameState& s, Vertex v) const {
    int i = terminal_index_[v];
    return i >= 0 && (s.pending >> i & 1u);
  }
  TerminalMask bit(Vertex v) const {
    int i = terminal_index_[v];
    return i >= 0 ? TerminalMask{1} << i : 0u;
  }

  VertexSet terminal_vertices(TerminalMask mask) const {
    VertexSet out;
    for (int i = 0; i < t_; ++i)
      if (mask >> i & 1u) out.push_back(terminals_[i]);
    return out;
  }

  bool can_reach_root(Vertex v) const { return to_root_[v] != 0; }
  bool reached_by_root(Vertex v) const { return from_root_[v] != 0; }

  /// ST(root, terminals(mask) ∪ {extra}); extra < 0 means none. kInfinity when infeasible.
  int st(Vertex root, TerminalMask mask, Vertex extra) {
    std::size_t slot = (static_cast<std::size_t>(extra + 1) << t_) | mask;
    const std::vector<int>* row = nullptr;
    if (dense_) {
      auto& cell = st_dense_[slot];
      if (cell.empty()) cell = fill_row(mask, extra);
      row = &cell;
    } else {
      auto it = st_sparse_.find(slot);
      if (it == st_sparse_.end()) it = st_sparse_.emplace(slot, fill_row(mask, extra)).first;
      row = &it->second;
    }
    return (*row)[root];
  }

  /// Calls emit(move, next) for every legal move out of `s` except zero-cost
  /// self-loops and moves into states that can no longer reach the target.
  template <class Emit>
  void expand(const GameState& s, Emit&& emit) {
    if (s == target_state()) return;
    if (s.pending != 0 && s.forward == target_state().forward && s.backward == s.forward) {
      int c = st(r0_, s.pending, -1);
      if (c < kInfinity) {
        Move m;
        m.kind = MoveKind::finish;
        m.cost = c;
        m.consumed = s.pending;
        emit(m, target_state());
      }
    }
    forward_steps(s, emit);
    backward_steps(s, emit);
    flips(s, emit);
  }

  /// Recomputes the witness (and checks the cost) of a move out of `s`.
  void materialize(const GameState& s, Move& m) {
    auto st_fn = [this](Vertex root, std::uint32_t mask, Vertex extra) { return st(root, mask, extra); };
    switch (m.kind) {
      case MoveKind::forward_step:
        m.witness.clear();
        return;
      case MoveKind::backward_step: {
        auto xs = terminal_vertices(m.consumed);
        xs.push_back(m.head);
        DstResult r = steiner_out(g_, m.tail, xs);
        if (!r.feasible()) throw InternalError("backward step lost feasibility");
        int fresh = occupied(s, m.tail) ? 0 : 1;
        if (*r.cost + fresh != m.cost) throw InternalError("backward step cost mismatch");
        m.witness = r.witness;
        return;
      }
      case MoveKind::finish: {
        DstResult r = steiner_out(g_, r0_, terminal_vertices(m.consumed));
        if (!r.feasible() || *r.cost != m.cost) throw InternalError("finishing move cost mismatch");
        m.witness = r.witness;
        return;
      }
      case MoveKind::flip:
      case MoveKind::flip_to_vertex: {
        GroundLayout layout = ground_layout(s, m.anchor);
        // Attach universe = pending terminals of s, as in the search.
        auto cst = compressed(layout, st_fn);
        FlipTable table(layout.order, layout.universe_size, cst);
        std::uint32_t J = 0;
        for (int i = 0; i < static_cast<int>(layout.order.size()); ++i) {
          Vertex v = layout.order[static_cast<std::size_t>(i)];
          if (m.flipped_forward.contains(v) || m.flipped_backward.contains(v)) J |= 1u << i;
        }
        std::uint32_t d = compress(layout, m.consumed);
        std::vector<typename FlipTable<CompressedSt<decltype(st_fn)>>::Segment> segs;
        int base = 0;
        if (m.kind == MoveKind::flip) {
          int j = layout.position(m.end);
          base = table.cost(J, j, d);
          if (base < kInfinity) segs = table.segments(J, j, d);
        } else {
          base = table.external_costs(J, m.end)[d];
          if (base < kInfinity) segs = table.external_segments(J, m.end, d);
          if (!occupied_for_flip_end(s, m.end)) base += 1;
        }
        if (base != m.cost) throw InternalError("flip cost mismatch");
        VertexSet witness;
        for (const auto& seg : segs) {
          auto xs = terminal_vertices(expand_mask(layout, seg.terminals));
          xs.push_back(seg.to);
          DstResult r = steiner_out(g_, seg.from, xs);
          if (!r.feasible()) throw InternalError("flip segment lost feasibility");
          witness = set_union(witness, r.witness);
        }
        VertexSet skip = set_union(m.flipped_forward.to_set(), m.flipped_backward.to_set());
        skip = set_union(skip, terminal_vertices(m.consumed));
        skip = set_union(skip, VertexSet{m.end});
        m.witness = set_difference(witness, skip);
        return;
      }
    }
  }

 private:
  struct GroundLayout {
    std::vector<Vertex> order;           // anchor first, then F ∪ B ascending
    std::vector<int> universe;           // terminal indices of the pending set
    int universe_size = 0;
    int position(Vertex v) const {
      return static_cast<int>(std::find(order.begin(), order.end(), v) - order.begin());
    }
  };

  template <class Inner>
  struct CompressedSt {
    const GroundLayout* layout;
    std::vector<TerminalMask> expand;
    Inner inner;
    int operator()(Vertex root, std::uint32_t mask, Vertex extra) const { return inner(root, expand[mask], extra); }
  };

  template <class Inner>
  CompressedSt<Inner> compressed(const GroundLayout& layout, Inner inner) const {
    CompressedSt<Inner> c{&layout, {}, inner};
    c.expand.resize(std::size_t{1} << layout.universe_size);
    for (std::uint32_t m = 0; m < c.expand.size(); ++m) c.expand[m] = expand_mask(layout, m);
    return c;
  }

  TerminalMask expand_mask(const GroundLayout& layout, std::uint32_t mask) const {
    TerminalMask out = 0;
    for (int i = 0; i < layout.universe_size; ++i)
      if (mask >> i & 1u) out |= TerminalMask{1} << layout.universe[static_cast<std::size_t>(i)];
    return out;
  }

  std::uint32_t compress(const GroundLayout& layout, TerminalMask mask) const {
    std::uint32_t out = 0;
    for (int i = 0; i < layout.universe_size; ++i)
      if (mask >> layout.universe[static_cast<std::size_t>(i)] & 1u) out |= 1u << i;
    return out;
  }

  GroundLayout ground_layout(const GameState& s, Vertex anchor) const {
    GroundLayout layout;
    layout.order.push_back(anchor);
    TokenSet all = s.forward;
    for (Vertex v : s.backward) all = all.with(v);
    for (Vertex v : all)
      if (v != anchor) layout.order.push_back(v);
    for (int i = 0; i < t_; ++i)
      if (s.pending >> i & 1u) layout.universe.push_back(i);
    layout.universe_size = static_cast<int>(layout.universe.size());
    return layout;
  }

  bool occupied(const GameState& s, Vertex v) const {
    return s.forward.contains(v) || s.backward.contains(v) || is_pending(s, v);
  }
  bool occupied_for_flip_end(const GameState& s, Vertex v) const {
    return s.forward.contains(v) || is_pending(s, v);
  }

  std::vector<int> fill_row(TerminalMask mask, Vertex extra) const {
    VertexSet xs = terminal_vertices(mask);
    if (extra >= 0) xs = set_union(xs, VertexSet{extra});
    if (xs.empty()) return std::vector<int>(static_cast<std::size_t>(n_), 0);
    return steiner_costs_all_roots(g_, xs);
  }

  template <class Emit>
  void forward_steps(const GameState& s, Emit& emit) {
    for (Vertex u : s.forward) {
      for (Vertex v : g_.out(u)) {
        if (!can_reach_root(v)) continue;
        GameState next{s.forward.without(u).with(v), s.backward, s.pending};
        Move m;
        m.kind = MoveKind::forward_step;
        m.tail = u;
        m.head = v;
        m.cost = occupied(s, v) ? 0 : 1;
        if (m.cost == 0 && next == s) continue;
        emit(m, next);
      }
    }
  }

  template <class Emit>
  void backward_steps(const GameState& s, Emit& emit) {
    for (Vertex v : s.backward) {
      for (Vertex u : g_.in(v)) {
        if (!reached_by_root(u)) continue;
        const int fresh = occupied(s, u) ? 0 : 1;
        const TokenSet nb = s.backward.without(v).with(u);
        for (TerminalMask sub = s.pending;; sub = (sub - 1) & s.pending) {
          int c = st(u, sub, v);
          if (c < kInfinity) {
            GameState next{s.forward, nb, s.pending & ~(sub | bit(u))};
            Move m;
            m.kind = MoveKind::backward_step;
            m.tail = u;
            m.head = v;
            m.consumed = sub;
            m.cost = c + fresh;
            if (!(m.cost == 0 && next == s)) emit(m, next);
          }
          if (sub == 0) break;
        }
      }
    }
  }

  template <class Emit>
  void flips(const GameState& s, Emit& emit) {
    auto st_fn = [this](Vertex root, std::uint32_t mask, Vertex extra) { return st(root, mask, extra); };
    for (Vertex f : s.forward) {
      if (!reached_by_root(f)) continue;  // f becomes a backward token
      GroundLayout layout = ground_layout(s, f);
      auto cst = compressed(layout, st_fn);
      FlipTable table(layout.order, layout.universe_size, cst);
      const int gsize = static_cast<int>(layout.order.size());
      const std::uint32_t dfull = table.universe_full();

      // Bits of each token set inside the ground order.
      auto bits_of = [&](const TokenSet& ts) {
        std::uint32_t b = 0;
        for (int i = 0; i < gsize; ++i)
          if (ts.contains(layout.order[static_cast<std::size_t>(i)])) b |= 1u << i;
        return b;
      };
      const std::uint32_t fbits = bits_of(s.forward);
      const std::uint32_t bbits = bits_of(s.backward);

      std::unordered_map<std::uint64_t, std::vector<int>> external;  // (J, v) -> costs per D'
      for (std::uint32_t fsub = fbits;; fsub = (fsub - 1) & fbits) {
        if (fsub & 1u) {
          for (std::uint32_t bsub = bbits;; bsub = (bsub - 1) & bbits) {
            const std::uint32_t J = fsub | bsub;
            TokenSet fprime = pick_ground(layout, fsub);
            TokenSet bprime = pick_ground(layout, bsub);
            TokenSet rest_f = s.forward.minus(fprime);
            TokenSet new_b = s.backward.minus(bprime).with(f);

            // 4a: forward tokens land on b ∈ B'.
            for (int j = 1; j < gsize; ++j) {
              if (!(bsub >> j & 1u)) continue;
              Vertex b = layout.order[static_cast<std::size_t>(j)];
              if (!can_reach_root(b)) continue;
              TokenSet new_f = rest_f.with(b);
              for (std::uint32_t d = dfull;; d = (d - 1) & dfull) {
                int c = table.cost(J, j, d);
                if (c < kInfinity) {
                  TerminalMask used = cst.expand[d];
                  GameState next{new_f, new_b, s.pending & ~(used | bit(f))};
                  if (!(c == 0 && next == s)) {
                    Move m;
                    m.kind = MoveKind::flip;
                    m.anchor = f;
                    m.end = b;
                    m.flipped_forward = fprime;
                    m.flipped_backward = bprime;
                    m.consumed = used;
                    m.cost = c;
                    emit(m, next);
                  }
                }
                if (d == 0) break;
              }
            }

            // 4b: forward tokens continue to an arbitrary v ∉ B; needs B' ≠ ∅ and D' ≠ ∅.
            if (bsub != 0 && dfull != 0) {
              const auto& from_f = reach_[f];
              for (Vertex v = 0; v < n_; ++v) {
                if (s.backward.contains(v) || !from_f[v] || !can_reach_root(v)) continue;
                std::uint64_t key = (static_cast<std::uint64_t>(J) << 32) | static_cast<std::uint32_t>(v);
                auto it = external.find(key);
                if (it == external.end()) it = external.emplace(key, table.external_costs(J, v)).first;
                const auto& costs = it->second;
                const int fresh = occupied_for_flip_end(s, v) ? 0 : 1;
                TokenSet new_f = rest_f.with(v);
                for (std::uint32_t d = dfull; d != 0; d = (d - 1) & dfull) {
                  if (costs[d] >= kInfinity) continue;
                  TerminalMask used = cst.expand[d];
                  GameState next{new_f, new_b, s.pending & ~(used | bit(f))};
                  Move m;
                  m.kind = MoveKind::flip_to_vertex;
                  m.anchor = f;
                  m.end = v;
                  m.flipped_forward = fprime;
                  m.flipped_backward = bprime;
                  m.consumed = used;
                  m.cost = costs[d] + fresh;
                  if (!(m.cost == 0 && next == s)) emit(m, next);
                }
              }
            }
            if (bsub == 0) break;
          }
        }
        if (fsub == 0) break;
      }
    }
  }

  static TokenSet pick_ground(const GroundLayout& layout, std::uint32_t bits) {
    TokenSet out;
    for (std::size_t i = 0; i < layout.order.size(); ++i)
      if (bits >> i & 1u) out = out.with(layout.order[i]);
    return out;
  }

  const Digraph& g_;
  VertexSet terminals_;
  Vertex r0_;
  int n_;
  int t_;
  std::vector<int> terminal_index_;
  std::vector<char> to_root_;
  std::vector<char> from_root_;
  std::vector<std::vector<char>> reach_;
  bool dense_ = false;
  std::vector<std::vector<int>> st_dense_;
  std::unordered_map<std::size_t, std::vector<int>> st_sparse_;
};

inline void check_game_input(const Digraph& g, const VertexSet& roots, const VertexSet& terminals, Vertex r0) {
  for (Vertex v : roots) check_vertex(g, v);
  for (Vertex v : terminals) check_vertex(g, v);
  if (roots.size() < 2) throw InvalidArgument("the token game needs at least two roots");
  if (roots.size() > static_cast<std::size_t>(kMaxRoots))
    throw GuardError("root count " + std::to_string(roots.size()) + " exceeds limit " + std::to_string(kMaxRoots));
  if (!contains(roots, r0)) throw InvalidArgument("r0 must be a root");
  if (!set_intersection(roots, terminals).empty()) throw InvalidArgument("roots and terminals must be disjoint");
}

}  // namespace detail

inline GameState initial_state(const VertexSet& roots, const VertexSet& terminals, Vertex r0) {
  VertexSet others;
  for (Vertex r : roots)
    if (r != r0) others.push_back(r);
  TokenSet tokens = TokenSet::of(others);
  TerminalMask all = terminals.empty() ? 0u : static_cast<TerminalMask>((std::uint64_t{1} << terminals.size()) - 1);
  return {tokens, tokens, all};
}

inline GameState target_state(Vertex r0) { return {TokenSet::of({r0}), TokenSet::of({r0}), 0}; }

/// Every legal successor of `state` with its cost. `terminals` fixes the bit
/// order of `state.pending`. Witnesses are left empty.
inline std::vector<Transition> enumerate_moves(const Digraph& g, const GameState& state, const VertexSet& terminals,
                                               Vertex r0) {
  detail::GameGraph game(g, terminals, r0);
  std::vector<Transition> out;
  game.expand(state, [&](const Move& m, const GameState& next) { out.push_back({m, next}); });
  return out;
}

/// Cheapest move sequence from (R', R', T) to ({r0}, {r0}, ∅), or nullopt when
/// the target is unreachable. Requires |R| ≥ 2, r0 ∈ R and R ∩ T = ∅.
inline std::optional<GameResult> shortest_game(const Digraph& g, const VertexSet& roots, const VertexSet& terminals,
                                               Vertex r0) {
  detail::check_game_input(g, roots, terminals, r0);
  detail::GameGraph game(g, terminals, r0);
  for (Vertex r : roots)
    if (!game.can_reach_root(r) || !game.reached_by_root(r)) return std::nullopt;
  for (Vertex t : terminals)
    if (!game.reached_by_root(t)) return std::nullopt;

  struct Node {
    int dist = kInfinity;
    bool closed = false;
    GameState parent;
    Move via;
  };
  using Entry = std::pair<int, GameState>;
  std::unordered_map<GameState, Node, GameStateHash> nodes;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

  const GameState start = initial_state(roots, terminals, r0);
  const GameState target = target_state(r0);
  nodes[start].dist = 0;
  heap.emplace(0, start);
  std::size_t settled = 0;

  while (!heap.empty()) {
    auto [d, s] = heap.top();
    heap.pop();
    Node& node = nodes[s];
    if (node.closed || d != node.dist) continue;
    node.closed = true;
    ++settled;
    if (s == target) break;
    game.expand(s, [&](const Move& m, const GameState& next) {
      int nd = d + m.cost;
      Node& nn = nodes[next];
      if (nn.closed || nd >= nn.dist) return;
      nn.dist = nd;
      nn.parent = s;
      nn.via = m;
      heap.emplace(nd, next);
    });
  }

  auto it = nodes.find(target);
  if (it == nodes.end() || !it->second.closed) return std::nullopt;

  GameResult result;
  result.cost = it->second.dist;
  result.settled_states = settled;
  for (GameState cur = target; cur != start;) {
    const Node& node = nodes.at(cur);
    result.moves.push_back(node.via);
    result.states.push_back(cur);
    cur = node.parent;
  }
  result.states.push_back(start);
  std::reverse(result.moves.begin(), result.moves.end());
  std::reverse(result.states.begin(), result.states.end());
  for (std::size_t i = 0; i < result.moves.size(); ++i) game.materialize(result.states[i], result.moves[i]);
  return result;
}

/// Union of move witnesses and token positions, minus R ∪ T. Throws
/// InternalError when the set fails the pedestal check or exceeds cost - 1.
inline VertexSet extract_solution(const GameResult& game, const Digraph& g, const VertexSet& roots,
                                  const VertexSet& terminals) {
  VertexSet s;
  for (const Move& m : game.moves) s = set_union(s, m.witness);
  for (const GameState& st : game.states) {
    s = set_union(s, st.forward.to_set());
    s = set_union(s, st.backward.to_set());
  }
  s = set_difference(s, set_union(roots, terminals));
  if (static_cast<int>(s.size()) > game.cost - 1) throw InternalError("extracted solution larger than game cost - 1");
  Instance check{g, roots, terminals, std::nullopt, Variant::pedestal};
  if (!verify(check, s)) throw InternalError("extracted solution fails the pedestal check");
  return s;
}

namespace detail {
inline void write_set(std::ostream& os, const VertexSet& s) {
  os << '{';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << '}';
}
}  // namespace detail

/// One line per move: `KIND cost=<c> F=<..> B=<..> D=<..> witness=<..>`, where
/// F, B, D describe the configuration after the move and D lists terminal ids.
inline void write_trace(std::ostream& os, const GameResult& game, const VertexSet& terminals) {
  for (std::size_t i = 0; i < game.moves.size(); ++i) {
    const Move& m = game.moves[i];
    const GameState& s = game.states[i + 1];
    VertexSet pending;
    for (std::size_t t = 0; t < terminals.size(); ++t)
      if (s.pending >> t & 1u) pending.push_back(terminals[t]);
    os << label(m.kind) << " cost=" << m.cost << " F=";
    detail::write_set(os, s.forward.to_set());
    os << " B=";
    detail::write_set(os, s.backward.to_set());
    os << " D=";
    detail::write_set(os, pending);
    os << " witness=";
    detail::write_set(os, m.witness);
    os << '\n';
  }
}

}  // namespace qrst
