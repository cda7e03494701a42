#pragma once

// Line-oriented text formats.
//
// Instance:
//   RST <unrestricted|pedestal|trunk>
//   n <n> m <m>
//   arc <u> <v>        (m lines)
//   R <ids...>
//   T <ids...>
//   k <budget>         (optional)
//
// PSI instance:
//   PSI
//   H <n> <m>
//   [edge] <u> <v>     (m lines)
//   G <n> <m>
//   [edge] <i> <j>     (m lines)
//   col <c_0> ... <c_{n_H - 1}>
//
// Blank lines and lines starting with '#' are ignored.

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qrst/error.hpp"
#include "qrst/graph.hpp"
#include "qrst/reductions.hpp"

namespace qrst {

namespace detail {

struct Line {
  int number = 0;
  std::vector<std::string> words;
};

inline std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::istringstream in{std::string(text)};
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream words(raw);
    Line line{number, {}};
    for (std::string w; words >> w;) line.words.push_back(w);
    if (!line.words.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

inline long long parse_int(const Line& line, const std::string& word) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(word, &used);
  } catch (const std::exception&) {
    throw ParseError(line.number, "expected an integer, got '" + word + "'");
  }
  if (used != word.size()) throw ParseError(line.number, "expected an integer, got '" + word + "'");
  return v;
}

inline int parse_id(const Line& line, const std::string& word, int n) {
  long long v = parse_int(line, word);
  if (v < 0 || v >= n) throw ParseError(line.number, "vertex id " + word + " out of range [0, " + std::to_string(n) + ")");
  return static_cast<int>(v);
}

inline int parse_count(const Line& line, const std::string& word) {
  long long v = parse_int(line, word);
  if (v < 0 || v > std::numeric_limits<int>::max() / 4) throw ParseError(line.number, "bad count " + word);
  return static_cast<int>(v);
}

class LineCursor {
 public:
  explicit LineCursor(std::vector<Line> lines) : lines_(std::move(lines)) {}

  const Line& next(std::string_view what) {
    if (pos_ >= lines_.size())
      throw ParseError(lines_.empty() ? 0 : lines_.back().number, "unexpected end of input, expected " + std::string(what));
    return lines_[pos_++];
  }
  const Line* peek() const { return pos_ < lines_.size() ? &lines_[pos_] : nullptr; }
  bool done() const { return pos_ >= lines_.size(); }

 private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

inline void expect_keyword(const Line& line, std::string_view kw) {
  if (line.words.front() != kw)
    throw ParseError(line.number, "expected '" + std::string(kw) + "', got '" + line.words.front() + "'");
}

inline VertexSet parse_id_list(const Line& line, int n) {
  VertexSet ids;
  for (std::size_t i = 1; i < line.words.size(); ++i) ids.push_back(parse_id(line, line.words[i], n));
  VertexSet sorted = make_set(ids);
  if (sorted.size() != ids.size()) throw ParseError(line.number, "duplicate vertex id in " + line.words.front() + " list");
  return sorted;
}

inline std::pair<int, int> parse_edge(const Line& line, int n) {
  std::size_t off = line.words.front() == "edge" || line.words.front() == "arc" ? 1 : 0;
  if (line.words.size() != off + 2) throw ParseError(line.number, "expected an edge '<u> <v>'");
  return {parse_id(line, line.words[off], n), parse_id(line, line.words[off + 1], n)};
}

}  // namespace detail

/// Parses the instance format. Self-loops and duplicate arcs are dropped.
inline Instance parse_instance(std::string_view text) {
  using namespace detail;
  LineCursor cur(tokenize(text));
  Instance inst;

  const Line& head = cur.next("header 'RST <variant>'");
  expect_keyword(head, "RST");
  if (head.words.size() != 2) throw ParseError(head.number, "expected 'RST <variant>'");
  auto variant = parse_variant(head.words[1]);
  if (!variant) throw ParseError(head.number, "unknown variant '" + head.words[1] + "'");
  inst.variant = *variant;

  const Line& size = cur.next("'n <n> m <m>'");
  if (size.words.size() != 4 || size.words[0] != "n" || size.words[2] != "m")
    throw ParseError(size.number, "expected 'n <n> m <m>'");
  const int n = parse_count(size, size.words[1]);
  const int m = parse_count(size, size.words[3]);

  std::vector<Arc> arcs;
  arcs.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const Line& line = cur.next("arc line");
    expect_keyword(line, "arc");
    auto [u, v] = parse_edge(line, n);
    arcs.push_back({u, v});
  }
  inst.graph = Digraph(n, arcs);

  const Line& roots = cur.next("'R <ids...>'");
  expect_keyword(roots, "R");
  inst.roots = parse_id_list(roots, n);
  if (inst.roots.empty()) throw ParseError(roots.number, "root set is empty");

  const Line& terms = cur.next("'T <ids...>'");
  expect_keyword(terms, "T");
  inst.terminals = parse_id_list(terms, n);
  if (inst.variant == Variant::pedestal && !set_intersection(inst.roots, inst.terminals).empty())
    throw ParseError(terms.number, "pedestal instance requires disjoint R and T");

  if (const Line* k = cur.peek(); k && k->words.front() == "k") {
    cur.next("k");
    if (k->words.size() != 2) throw ParseError(k->number, "expected 'k <budget>'");
    inst.budget = parse_count(*k, k->words[1]);
  }
  if (const Line* extra = cur.peek()) throw ParseError(extra->number, "unexpected trailing content");
  return inst;
}

inline std::string render_instance(const Instance& inst) {
  std::ostringstream os;
  os << "RST " << to_string(inst.variant) << '\n';
  os << "n " << inst.graph.size() << " m " << inst.graph.arc_count() << '\n';
  for (const Arc& a : inst.graph.arcs()) os << "arc " << a.from << ' ' << a.to << '\n';
  os << 'R';
  for (Vertex v : inst.roots) os << ' ' << v;
  os << "\nT";
  for (Vertex v : inst.terminals) os << ' ' << v;
  os << '\n';
  if (inst.budget) os << "k " << *inst.budget << '\n';
  return os.str();
}

inline PsiInstance parse_psi(std::string_view text) {
  using namespace detail;
  LineCursor cur(tokenize(text));
  PsiInstance psi;
  const Line& head = cur.next("header 'PSI'");
  expect_keyword(head, "PSI");

  auto graph = [&](std::string_view kw, UndirectedGraph& g) {
    const Line& line = cur.next(std::string(kw) + " line");
    expect_keyword(line, kw);
    if (line.words.size() != 3) throw ParseError(line.number, "expected '" + std::string(kw) + " <n> <m>'");
    g.n = parse_count(line, line.words[1]);
    const int m = parse_count(line, line.words[2]);
    for (int i = 0; i < m; ++i) g.edges.push_back(parse_edge(cur.next("edge line"), g.n));
  };
  graph("H", psi.host);
  graph("G", psi.pattern);

  const Line& col = cur.next("'col' line");
  expect_keyword(col, "col");
  if (static_cast<int>(col.words.size()) != psi.host.n + 1)
    throw ParseError(col.number, "expected one colour per host vertex");
  for (int i = 0; i < psi.host.n; ++i) psi.color.push_back(parse_id(col, col.words[i + 1], psi.pattern.n));
  if (const Line* extra = cur.peek()) throw ParseError(extra->number, "unexpected trailing content");
  return psi;
}

inline std::string render_psi(const PsiInstance& psi) {
  std::ostringstream os;
  os << "PSI\n";
  os << "H " << psi.host.n << ' ' << psi.host.edges.size() << '\n';
  for (auto [u, v] : psi.host.edges) os << "edge " << u << ' ' << v << '\n';
  os << "G " << psi.pattern.n << ' ' << psi.pattern.edges.size() << '\n';
  for (auto [u, v] : psi.pattern.edges) os << "edge " << u << ' ' << v << '\n';
  os << "col";
  for (int c : psi.color) os << ' ' << c;
  os << '\n';
  return os.str();
}

struct RandomSpec {
  int n = 0;
  double arc_prob = 0.0;
  int roots = 1;
  int terminals = 0;
  std::uint64_t seed = 0;
  Variant variant = Variant::pedestal;
};

namespace detail {

// Derived directly from mt19937_64 words so output is identical on every
// standard library (the <random> distributions are implementation-defined).
inline double unit_interval(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % bound;
}

}  // namespace detail

/// Each ordered pair (u, v), u ≠ v, becomes an arc with probability arc_prob;
/// roots and terminals are a uniform disjoint draw. PRNG: mt19937_64(seed).
inline Instance gen_random(const RandomSpec& spec) {
  if (spec.n < 0) throw InvalidArgument("n must be nonnegative");
  if (!(spec.arc_prob >= 0.0 && spec.arc_prob <= 1.0)) throw InvalidArgument("arc probability must lie in [0, 1]");
  if (spec.roots < 1) throw InvalidArgument("at least one root is required");
  if (spec.terminals < 0 || spec.roots + spec.terminals > spec.n)
    throw InvalidArgument("roots + terminals must not exceed n");

  std::mt19937_64 rng(spec.seed);
  std::vector<Arc> arcs;
  for (Vertex u = 0; u < spec.n; ++u)
    for (Vertex v = 0; v < spec.n; ++v)
      if (u != v && detail::unit_interval(rng) < spec.arc_prob) arcs.push_back({u, v});

  std::vector<Vertex> perm(static_cast<std::size_t>(spec.n));
  for (Vertex v = 0; v < spec.n; ++v) perm[v] = v;
  const int picks = spec.roots + spec.terminals;
  for (int i = 0; i < picks; ++i) {
    auto j = i + static_cast<int>(detail::below(rng, static_cast<std::uint64_t>(spec.n - i)));
    std::swap(perm[i], perm[j]);
  }
  Instance inst;
  inst.graph = Digraph(spec.n, arcs);
  inst.roots = make_set({perm.begin(), perm.begin() + spec.roots});
  inst.terminals = make_set({perm.begin() + spec.roots, perm.begin() + picks});
  inst.variant = spec.variant;
  return inst;
}

}  // namespace qrst
