// netiqc: robust stability analysis of interconnected uncertain systems.
//
//   netiqc analyze <file> [--path sparse|lumped|both] [--mode central|dist]
//                         [--x scalar|diag] [--merge K] [--grid SPEC]
//                         [--format text|kv] [--out PATH] [--trace PATH]
//   netiqc chain <N> [--pole P] [--gain G] [--coupling C] [--delta B] [--emit PATH]
//   netiqc pattern <file> [--omega W] [--x scalar|diag] [--merge K]
//                         [--out PATH] [--cliques PATH]
//
// Exit codes: 0 strictly feasible, 1 infeasible, 2 inconclusive, 64 usage or
// parse error, 70 internal error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "netiqc/netfile.hpp"

using namespace netiqc;

namespace {

constexpr int kUsage = 64;
constexpr int kInternal = 70;

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::StrictlyFeasible: return 0;
    case Verdict::Infeasible: return 1;
    case Verdict::Inconclusive: return 2;
  }
  return 2;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  return os;
}

const std::map<std::string, XMode> kXModes{{"scalar", XMode::SharedScalar},
                                           {"diag", XMode::Diagonal}};

struct AnalyzeArgs {
  std::string file, path = "sparse", mode = "central", x = "scalar", grid, format = "text", out,
                    trace;
  int merge = 0;
};

int cmd_analyze(const AnalyzeArgs& a) {
  const NetworkFile nf = load_network_file(a.file);
  AnalysisOptions opts;
  opts.path = a.path == "sparse" ? LmiPath::Sparse
                                 : (a.path == "lumped" ? LmiPath::Lumped : LmiPath::Both);
  opts.mode = a.mode == "central" ? SolveMode::Centralized : SolveMode::Distributed;
  opts.x_mode = kXModes.at(a.x);
  opts.merge_max_order = a.merge;
  opts.solver = nf.solver;
  opts.solver.record_trace = !a.trace.empty();
  opts.multiplier = nf.multiplier;
  FrequencyGrid grid = FrequencyGrid::standard();
  if (nf.grid) grid = *nf.grid;
  if (!a.grid.empty()) grid = FrequencyGrid::parse(a.grid);

  const AnalysisReport rep = analyze(nf.network, grid, opts);

  auto write = [&](std::ostream& os) {
    if (a.format == "kv") {
      rep.write_keyvalue(os);
    } else {
      rep.write_text(os);
    }
  };
  if (a.out.empty()) {
    write(std::cout);
  } else {
    auto os = open_out(a.out);
    write(os);
    std::cout << "overall verdict: " << to_string(rep.overall) << " (report written to " << a.out
              << ")\n";
  }
  if (!a.trace.empty()) {
    auto os = open_out(a.trace);
    for (const auto& r : rep.records) {
      const auto* res = r.sparse ? &*r.sparse : (r.lumped ? &*r.lumped : nullptr);
      if (!res) continue;
      os << "# omega " << r.omega << '\n';
      for (const auto& row : res->trace) {
        os << row.round << ", " << row.primal << ", " << row.dual << ", " << row.t << '\n';
      }
    }
  }
  return exit_code(rep.overall);
}

struct ChainArgs {
  int n = 0;
  ChainTemplate tmpl;
  std::string emit;
};

int cmd_chain(const ChainArgs& a) {
  if (a.n < 2) {
    std::cerr << "netiqc chain: N must be at least 2\n";
    return kUsage;
  }
  NetworkFile nf{make_chain(a.n, a.tmpl), std::nullopt, {}, {}};
  if (a.emit.empty()) {
    write_network_file(std::cout, nf);
  } else {
    auto os = open_out(a.emit);
    write_network_file(os, nf);
    std::cout << "wrote chain of " << a.n << " subsystems to " << a.emit << '\n';
  }
  return 0;
}

struct PatternArgs {
  std::string file, x = "scalar", out, cliques;
  double omega = 0.0;
  int merge = 0;
};

int cmd_pattern(const PatternArgs& a) {
  const NetworkFile nf = load_network_file(a.file);
  const auto form = build_sparse_lmi(nf.network, a.omega, kXModes.at(a.x), nf.multiplier);
  const auto pattern = pattern_of(form);
  const auto tree = clique_tree_of(form, a.merge);
  std::cout << "order " << form.order() << ", nonzeros " << pattern.nonzeros() << ", cliques "
            << tree.size() << ", max clique order " << tree.max_order();
  if (tree.merge_refused) std::cout << " (merge refused: bound below largest clique)";
  std::cout << '\n';
  if (!a.out.empty()) {
    auto os = open_out(a.out);
    pattern.write_coordinates(os);
  }
  if (!a.cliques.empty()) {
    auto os = open_out(a.cliques);
    tree.write_report(os);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust stability analysis of networks of uncertain systems"};
  app.require_subcommand(1);

  AnalyzeArgs aa;
  auto* analyze_cmd = app.add_subcommand("analyze", "Frequency-gridded robust stability analysis");
  analyze_cmd->add_option("file", aa.file, "Network file")->required();
  analyze_cmd->add_option("--path", aa.path, "LMI to solve")
      ->check(CLI::IsMember({"sparse", "lumped", "both"}));
  analyze_cmd->add_option("--mode", aa.mode, "Centralized or distributed solve")
      ->check(CLI::IsMember({"central", "dist"}));
  analyze_cmd->add_option("--x", aa.x, "Interconnection scaling")
      ->check(CLI::IsMember({"scalar", "diag"}));
  analyze_cmd->add_option("--merge", aa.merge, "Merge cliques up to this order (0 = off)")
      ->check(CLI::NonNegativeNumber);
  analyze_cmd->add_option("--grid", aa.grid, "Frequencies, e.g. 0,log:0.01:100:50,inf");
  analyze_cmd->add_option("--format", aa.format, "Report format")
      ->check(CLI::IsMember({"text", "kv"}));
  analyze_cmd->add_option("--out", aa.out, "Report path (default: stdout)");
  analyze_cmd->add_option("--trace", aa.trace, "Per-round solver trace path");

  ChainArgs ca;
  auto* chain_cmd = app.add_subcommand("chain", "Generate a chain network file");
  chain_cmd->add_option("N", ca.n, "Number of subsystems")->required();
  chain_cmd->add_option("--pole", ca.tmpl.pole, "Subsystem pole (x' = -pole x + ...)");
  chain_cmd->add_option("--gain", ca.tmpl.gain, "Output gain p = gain x");
  chain_cmd->add_option("--coupling", ca.tmpl.coupling, "Neighbor coupling gain");
  chain_cmd->add_option("--delta", ca.tmpl.delta_bound, "Uncertainty norm bound");
  chain_cmd->add_option("--emit", ca.emit, "Output path (default: stdout)");

  PatternArgs pa;
  auto* pattern_cmd = app.add_subcommand("pattern", "Export the sparse LMI pattern and cliques");
  pattern_cmd->add_option("file", pa.file, "Network file")->required();
  pattern_cmd->add_option("--omega", pa.omega, "Frequency")->check(CLI::NonNegativeNumber);
  pattern_cmd->add_option("--x", pa.x, "Interconnection scaling")
      ->check(CLI::IsMember({"scalar", "diag"}));
  pattern_cmd->add_option("--merge", pa.merge, "Merge cliques up to this order (0 = off)")
      ->check(CLI::NonNegativeNumber);
  pattern_cmd->add_option("--out", pa.out, "Coordinate list path");
  pattern_cmd->add_option("--cliques", pa.cliques, "Clique report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(aa);
    if (*chain_cmd) return cmd_chain(ca);
    if (*pattern_cmd) return cmd_pattern(pa);
  } catch (const ParseError& e) {
    std::cerr << "netiqc: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "netiqc: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "netiqc: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
