// sitnet: generate wired exhaustions, solve unit current flows, measure
// intersection statistics of the induced path measure, verify every
// inequality, and scan radii.
//
//   sitnet gen     --family diamond --n 6 --out g.json
//   sitnet solve   --graph g.json --out f.json
//   sitnet measure --graph g.json --flow f.json --pairs 100000 --seed 7 --out r.json
//   sitnet verify  --graph g.json [--flow f.json]
//   sitnet scan    --family lattice --dim 3 --from 4 --to 14 --out lattice3.csv
//
// Exit codes: 0 success, 1 check failure, 2 usage or input error,
// 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sitnet/sitnet.hpp"

namespace {

using namespace sitnet;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

std::shared_ptr<const Network> load_graph(const std::string& path) {
  std::vector<std::string> warnings;
  auto net = std::make_shared<const Network>(read_network(path, &warnings));
  for (const auto& w : warnings) std::cerr << "warning: " << path << ": " << w << "\n";
  return net;
}

void print_cycle(const CycleError& e) {
  std::cerr << "error: " << e.what() << "\npositive-flow cycle:";
  for (VertexId v : e.cycle()) std::cerr << " " << v;
  if (!e.cycle().empty()) std::cerr << " " << e.cycle().front();
  std::cerr << "\n";
}

void print_check(const CheckResult& c) {
  std::printf("%s %-28s slack=%.6e%s%s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.slack,
              c.detail.empty() ? "" : "  ", c.detail.c_str());
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string family;
  int n = 0, l = 0, dim = 0, r = 0, depth = 0;
  std::string out = "-";
};

int cmd_gen(const GenArgs& a) {
  const GraphFamily family = GraphFamily::parse(a.family, a.dim);
  int param = 0;
  const char* needed = "";
  switch (family.kind) {
    case FamilyKind::Path: param = a.l, needed = "--l"; break;
    case FamilyKind::Diamond: param = a.n, needed = "--n"; break;
    case FamilyKind::BinaryTree: param = a.depth, needed = "--depth"; break;
    case FamilyKind::Lattice: param = a.r, needed = "--r"; break;
  }
  if (param <= 0)
    throw InputError(std::string("family ") + a.family + " needs a positive " + needed);
  emit(a.out, network_to_json(exhaustion(family, param)));
  return kExitOk;
}

struct SolveArgs {
  std::string graph, out;
  double tol = kDefaultSolverTolerance;
};

int cmd_solve(const SolveArgs& a) {
  auto net = load_graph(a.graph);
  const Flow flow = unit_current_flow(net, a.tol);
  write_flow(a.out, flow);
  std::printf("R_eff=%.12f\n", energy(flow));
  return kExitOk;
}

struct MeasureArgs {
  std::string graph, flow, out = "-";
  bool exact = false;
  std::optional<std::size_t> pairs;
  std::optional<std::uint64_t> seed;
  std::string dump_paths;
  std::size_t dump_count = 1000;
  unsigned workers = 0;
};

int cmd_measure(const MeasureArgs& a) {
  if (a.exact && a.pairs) throw InputError("--exact and --pairs are mutually exclusive");
  if ((a.pairs || !a.dump_paths.empty()) && !a.seed)
    throw InputError("stochastic modes need an explicit --seed");
  auto net = load_graph(a.graph);
  const Flow flow = read_flow(a.flow, net);
  ReportOptions opts;
  opts.mc_pairs = a.pairs.value_or(0);
  opts.seed = a.seed.value_or(0);
  if (a.workers > 0) opts.workers = a.workers;
  const IntersectionReport report = build_report(flow, opts);
  emit(a.out, report_to_json(report));
  if (!a.dump_paths.empty()) {
    const PathKernel kernel = build_kernel(flow);
    const auto paths = sample_paths(kernel, a.dump_count, *a.seed, opts.workers);
    std::ostringstream dump;
    write_path_dump(dump, paths, report.graph_hash, *a.seed);
    emit(a.dump_paths, dump.str());
  }
  if (a.out != "-" && !a.out.empty())
    std::printf("E_edge=%.12g E_vertex=%.12g checks=%zu/%zu\n", report.e_edge, report.e_vertex,
                report.checks_passed(), report.checks.size());
  return kExitOk;
}

struct VerifyArgs {
  std::string graph, flow;
  double tol = kDefaultSolverTolerance;
};

int cmd_verify(const VerifyArgs& a) {
  auto net = load_graph(a.graph);
  std::vector<CheckResult> extra;
  std::optional<Flow> flow;
  std::optional<double> escape_mass;
  if (!a.flow.empty()) {
    flow = read_flow(a.flow, net);
  } else {
    flow = unit_current_flow(net, a.tol);
    const Potential h = harmonic_solve(*net, a.tol);
    double lo = 0.0, hi = 0.0;
    for (double x : h.values) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    extra.push_back(make_check("potential_max_principle", std::min(lo + a.tol, 1.0 + a.tol - hi),
                               "h in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"));
    const HittingFlow hit = hitting_flow(net, a.tol);
    escape_mass = hit.escape_mass;
    double worst = 0.0;
    for (std::size_t e = 0; e < net->edge_count(); ++e)
      worst = std::max(worst, std::abs(hit.flow.values()[e] - flow->values()[e]));
    CheckTolerances tol;
    extra.push_back(make_check("hitting_matches_current", tol.flow_match - worst,
                               "max per-edge difference " + std::to_string(worst)));
    extra.push_back(loop_check("hitting_no_positive_loops", hit.flow));
    extra.push_back(root_inflow_check("hitting_no_flow_into_root", hit.flow));
  }

  std::vector<CheckResult> checks;
  try {
    IntersectionReport report = build_report(*flow);
    checks = std::move(report.checks);
    for (VertexId v : report.interior_absorbers)
      std::printf("note: vertex %u absorbs flow without passing it on\n", v);
  } catch (const CycleError& e) {
    CheckResult c{"no_positive_loops", false, -1.0, "cycle"};
    for (VertexId v : e.cycle()) c.detail += " " + std::to_string(v);
    checks.push_back(c);
    checks.push_back(root_inflow_check("no_flow_into_root", *flow));
    checks.push_back(divergence_check("flow_divergence", *flow, CheckTolerances{}.divergence));
    std::printf("note: path-measure checks skipped, no kernel without a loop-free flow\n");
  }
  checks.insert(checks.end(), extra.begin(), extra.end());

  std::size_t failed = 0;
  for (const auto& c : checks) {
    print_check(c);
    failed += !c.passed;
  }
  if (escape_mass) std::printf("escape_mass=%.12g\n", *escape_mass);
  std::printf("%zu/%zu checks passed\n", checks.size() - failed, checks.size());
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

struct ScanArgs {
  std::string family, out = "-";
  int dim = 0, from = 0, to = 0, step = 1;
  std::size_t pairs = 0;
  std::optional<std::uint64_t> seed;
  double tol = kDefaultSolverTolerance;
  unsigned workers = 0;
};

int cmd_scan(const ScanArgs& a) {
  const GraphFamily family = GraphFamily::parse(a.family, a.dim);
  if (a.from < 1 || a.to < a.from || a.step < 1)
    throw InputError("need 1 <= --from <= --to and --step >= 1");
  if (a.pairs > 0 && !a.seed) throw InputError("--pairs needs an explicit --seed");
  std::vector<int> radii;
  for (int r = a.from; r <= a.to; r += a.step) radii.push_back(r);
  ScanOptions opts;
  opts.mc_pairs = a.pairs;
  opts.seed = a.seed.value_or(0);
  opts.tol = a.tol;
  if (a.workers > 0) opts.workers = a.workers;
  const ScanResult scan = sit_scan(family, radii, opts);
  for (const auto& e : scan.errors)
    std::cerr << "error: radius " << e.radius << ": " << e.message << "\n";
  std::ostringstream csv;
  write_scan_csv(csv, scan);
  emit(a.out, csv.str());
  std::FILE* info = (a.out == "-" || a.out.empty()) ? stderr : stdout;
  auto line = [&](const char* column, const TrendSummary& t) {
    // "edge-SIT trend" only makes sense for the E_edge column
    const bool edge = std::string(column) == "E_edge";
    const char* label =
        t.trend == Trend::Stabilizing && !edge ? "stabilizing" : trend_label(t.trend);
    std::fprintf(info, "%s %s: %s (relative change %.3e", scan.family.c_str(), column, label,
                 t.relative_change);
    if (t.decay_exponent) std::fprintf(info, ", increment decay exponent %.3f", *t.decay_exponent);
    std::fprintf(info, ")\n");
  };
  line("R_eff", scan.r_eff_trend);
  line("E_edge", scan.e_edge_trend);
  line("E_vertex", scan.e_vertex_trend);
  return scan.rows.empty() ? kExitNumerical : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unit flows, path measures and intersection tails on wired exhaustions"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Write a generated network as sitnet-graph-v1 JSON");
  g->add_option("--family", gen.family, "path | lattice | tree | diamond")->required();
  g->add_option("--n", gen.n, "diamond levels N");
  g->add_option("--l", gen.l, "path length L");
  g->add_option("--dim", gen.dim, "lattice dimension d");
  g->add_option("--r", gen.r, "lattice radius r");
  g->add_option("--depth", gen.depth, "binary tree depth D");
  g->add_option("--out", gen.out, "output file, - for stdout");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve the unit current flow, write sitnet-flow-v1 JSON");
  s->add_option("--graph", solve.graph)->required();
  s->add_option("--out", solve.out, "flow file")->required();
  s->add_option("--tol", solve.tol, "relative residual tolerance")->check(CLI::PositiveNumber);

  MeasureArgs measure;
  auto* m = app.add_subcommand("measure", "Intersection report of the flow's path measure");
  m->add_option("--graph", measure.graph)->required();
  m->add_option("--flow", measure.flow)->required();
  m->add_flag("--exact", measure.exact, "exact quantities only (default)");
  m->add_option("--pairs", measure.pairs, "Monte Carlo path pairs")->check(CLI::Range(2ul, 1ul << 40));
  m->add_option("--seed", measure.seed);
  m->add_option("--out", measure.out, "report file, - for stdout");
  m->add_option("--dump-paths", measure.dump_paths, "write sampled paths to this file");
  m->add_option("--dump-count", measure.dump_count, "number of paths to dump");
  m->add_option("--workers", measure.workers, "sampling threads (0 = all cores)");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Run every inequality check, exit 1 on any failure");
  v->add_option("--graph", verify.graph)->required();
  v->add_option("--flow", verify.flow, "check this flow instead of the solved one");
  v->add_option("--tol", verify.tol)->check(CLI::PositiveNumber);

  ScanArgs scan;
  auto* sc = app.add_subcommand("scan", "Exact intersection statistics over a range of radii");
  sc->add_option("--family", scan.family)->required();
  sc->add_option("--dim", scan.dim, "lattice dimension");
  sc->add_option("--from", scan.from)->required();
  sc->add_option("--to", scan.to)->required();
  sc->add_option("--step", scan.step);
  sc->add_option("--pairs", scan.pairs, "Monte Carlo pairs per row (0 = exact only)");
  sc->add_option("--seed", scan.seed);
  sc->add_option("--out", scan.out, "CSV file, - for stdout");
  sc->add_option("--tol", scan.tol)->check(CLI::PositiveNumber);
  sc->add_option("--workers", scan.workers);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_gen(gen);
    if (s->parsed()) return cmd_solve(solve);
    if (m->parsed()) return cmd_measure(measure);
    if (v->parsed()) return cmd_verify(verify);
    if (sc->parsed()) return cmd_scan(scan);
  } catch (const CycleError& e) {
    print_cycle(e);
    return kExitNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
