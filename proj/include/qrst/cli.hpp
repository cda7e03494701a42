#pragma once

// `qrst` command-line front-end. run() is the whole program minus main(), so
// tests can drive it with in-memory streams.
//
// Exit codes:
//   0   success (verify: witness passes; oracle --budget: YES)
//   1   verify: witness fails; oracle --budget: NO
//   2   INFEASIBLE
//   3   --compare-oracle disagreement
//   64  usage error
//   65  bad input data (parse errors, guard violations, invalid arguments)
//   66  input file cannot be opened
//   70  internal consistency failure

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qrst/error.hpp"
#include "qrst/graph.hpp"
#include "qrst/io.hpp"
#include "qrst/oracle.hpp"
#include "qrst/reductions.hpp"
#include "qrst/solvers.hpp"
#include "qrst/steiner_dst.hpp"

namespace qrst::cli {

enum ExitCode : int {
  kOk = 0,
  kRejected = 1,
  kInfeasible = 2,
  kMismatch = 3,
  kUsage = 64,
  kDataError = 65,
  kNoInput = 66,
  kSoftware = 70,
};

class MissingInput : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::string read_input(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path);
  if (!in) throw MissingInput("cannot open " + path);
  buf << in.rdbuf();
  return buf.str();
}

inline void write_ids(std::ostream& os, const char* label, const VertexSet& s) {
  os << label << ':';
  for (Vertex v : s) os << ' ' << v;
  os << '\n';
}

inline void write_solution(std::ostream& os, const Solution& sol) {
  os << "OPT " << sol.size << '\n';
  write_ids(os, "S", sol.steiner_set);
  if (sol.trunk_vertex) os << "trunk: " << *sol.trunk_vertex << '\n';
}

inline Variant variant_option(const std::string& s) {
  auto v = parse_variant(s);
  if (!v) throw InvalidArgument("unknown variant '" + s + "'");
  return *v;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact solvers for q-Root Steiner Tree on digraphs", "qrst"};
  app.require_subcommand(1);

  std::string file;
  std::string variant;
  bool trace = false;
  bool compare = false;
  std::optional<int> r0;
  std::optional<int> root;
  bool in_tree = false;
  std::optional<int> budget;
  std::vector<int> set;
  RandomSpec spec;
  std::string gen_variant = "pedestal";
  int psi_roots = 2;

  auto* solve = app.add_subcommand("solve", "Solve a pedestal or trunk instance exactly");
  solve->add_option("file", file, "Instance file ('-' for stdin)")->required();
  solve->add_option("--variant", variant, "Override the instance variant")->check(CLI::IsMember({"pedestal", "trunk"}));
  solve->add_flag("--trace", trace, "Print the token game move sequence");
  solve->add_flag("--compare-oracle", compare, "Cross-check the value against brute force");
  solve->add_option("--r0", r0, "Root that plays r0 in the token game");

  auto* dst = app.add_subcommand("solve-dst", "Directed Steiner tree from one root to the terminal set");
  dst->add_option("file", file, "Instance file ('-' for stdin)")->required();
  dst->add_option("--root", root, "Tree root (default: smallest root)");
  dst->add_flag("--in", in_tree, "In-tree: every terminal reaches the root");

  auto* oracle = app.add_subcommand("oracle", "Brute-force optimum or decision");
  oracle->add_option("file", file, "Instance file ('-' for stdin)")->required();
  oracle->add_option("--variant", variant, "Override the instance variant")
      ->check(CLI::IsMember({"unrestricted", "pedestal", "trunk"}));
  oracle->add_option("--budget", budget, "Decide whether OPT <= budget");

  auto* check = app.add_subcommand("verify", "Check a Steiner set against the instance");
  check->add_option("file", file, "Instance file ('-' for stdin)")->required();
  check->add_option("--variant", variant, "Override the instance variant")
      ->check(CLI::IsMember({"unrestricted", "pedestal", "trunk"}));
  check->add_option("--set", set, "Steiner vertex ids")->expected(0, -1);

  auto* gen = app.add_subcommand("gen-random", "Print a seeded random instance");
  gen->add_option("--n", spec.n, "Vertex count")->required();
  gen->add_option("--p", spec.arc_prob, "Arc probability")->required();
  gen->add_option("--q", spec.roots, "Root count")->required();
  gen->add_option("--t", spec.terminals, "Terminal count")->required();
  gen->add_option("--seed", spec.seed, "PRNG seed (mt19937_64)")->required();
  gen->add_option("--variant", gen_variant, "Variant written to the header")
      ->check(CLI::IsMember({"unrestricted", "pedestal", "trunk"}));

  auto* psi = app.add_subcommand("reduce-psi", "Build the RST instance of a PSI instance");
  psi->add_option("file", file, "PSI file ('-' for stdin)")->required();
  psi->add_option("--q", psi_roots, "Root count (extra roots point at r_V)")->check(CLI::Range(2, kMaxRoots));

  auto* forkcmd = app.add_subcommand("fork", "Print the forked instance");
  forkcmd->add_option("file", file, "Instance file ('-' for stdin)")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "qrst: " << e.what() << '\n';
    return kUsage;
  }

  auto load = [&] {
    Instance inst = parse_instance(detail::read_input(file));
    if (!variant.empty()) inst.variant = detail::variant_option(variant);
    inst.validate();
    return inst;
  };

  try {
    if (*solve) {
      Instance inst = load();
      if (inst.variant == Variant::unrestricted) {
        err << "qrst: solve needs a pedestal or trunk instance (use --variant)\n";
        return kUsage;
      }
      PedestalOptions opts;
      opts.r0 = r0;
      std::ostringstream trace_buf;
      if (trace) opts.trace = &trace_buf;
      if (r0 && !contains(inst.roots, *r0)) throw InvalidArgument("--r0 must be a root");
      std::optional<Solution> sol = qrst::solve(inst, opts);
      out << trace_buf.str();
      if (sol)
        detail::write_solution(out, *sol);
      else
        out << "INFEASIBLE\n";
      if (compare) {
        auto truth = brute_force(inst);
        std::optional<int> mine = sol ? std::optional<int>(sol->size) : std::nullopt;
        std::optional<int> theirs = truth ? std::optional<int>(truth->opt) : std::nullopt;
        if (mine != theirs) {
          err << "qrst: oracle disagrees: oracle "
              << (theirs ? std::to_string(*theirs) : std::string("INFEASIBLE")) << '\n';
          return kMismatch;
        }
        out << "oracle: agree\n";
      }
      return sol ? kOk : kInfeasible;
    }

    if (*dst) {
      Instance inst = load();
      Vertex r = root.value_or(inst.roots.front());
      DstResult res = in_tree ? steiner_in(inst.graph, r, inst.terminals) : steiner_out(inst.graph, r, inst.terminals);
      if (!res.feasible()) {
        out << "INFEASIBLE\n";
        return kInfeasible;
      }
      out << "OPT " << *res.cost << '\n';
      detail::write_ids(out, "S", res.witness);
      return kOk;
    }

    if (*oracle) {
      Instance inst = load();
      if (budget || inst.budget) {
        bool yes = brute_force_decision(inst, budget.value_or(inst.budget.value_or(0)));
        out << (yes ? "YES" : "NO") << '\n';
        return yes ? kOk : kRejected;
      }
      auto res = brute_force(inst);
      if (!res) {
        out << "INFEASIBLE\n";
        return kInfeasible;
      }
      out << "OPT " << res->opt << '\n';
      detail::write_ids(out, "S", res->steiner_set);
      return kOk;
    }

    if (*check) {
      Instance inst = load();
      VertexSet s = make_set(set);
      if (s.size() != set.size()) throw InvalidArgument("duplicate id in --set");
      VerifyResult res = verify(inst, s);
      if (res) {
        out << "PASS";
        if (res.trunk) out << " trunk: " << *res.trunk;
        out << '\n';
        return kOk;
      }
      out << "FAIL";
      if (res.failure) out << ": no path " << res.failure->first << " -> " << res.failure->second;
      out << '\n';
      return kRejected;
    }

    if (*gen) {
      spec.variant = detail::variant_option(gen_variant);
      out << render_instance(gen_random(spec));
      return kOk;
    }

    if (*psi) {
      RstReductionOutput red = psi_to_rst(parse_psi(detail::read_input(file)), psi_roots);
      if (red.dropped_host_edges > 0) out << "# dropped host edges: " << red.dropped_host_edges << '\n';
      for (std::size_t v = 0; v < red.roles.size(); ++v)
        out << "# " << v << ' ' << to_string(red.roles[v]) << ' ' << red.names[v] << '\n';
      out << render_instance(red.instance);
      return kOk;
    }

    if (*forkcmd) {
      Instance inst = load();
      ForkResult f = fork(inst.graph, inst.roots, inst.terminals);
      Instance forked{f.graph, f.roots, f.terminals, std::nullopt, inst.variant};
      if (inst.budget)
        forked.budget = 2 * *inst.budget + static_cast<int>(set_union(inst.roots, inst.terminals).size());
      out << render_instance(forked);
      return kOk;
    }
  } catch (const MissingInput& e) {
    err << "qrst: " << e.what() << '\n';
    return kNoInput;
  } catch (const InternalError& e) {
    err << "qrst: internal error: " << e.what() << '\n';
    return kSoftware;
  } catch (const Error& e) {
    err << "qrst: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace qrst::cli
