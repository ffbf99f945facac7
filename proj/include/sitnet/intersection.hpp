#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sitnet/error.hpp"
#include "sitnet/io.hpp"
#include "sitnet/network.hpp"
#include "sitnet/path_measure.hpp"
#include "sitnet/random.hpp"
#include "sitnet/solver.hpp"

namespace sitnet {

// Absolute tolerances of the inequality checks.
struct CheckTolerances {
  double divergence = 1e-8;
  double energy = 1e-8;
  double visit = 1e-9;
  double row_sum = 1e-12;
  double flow_match = 1e-8;
};

enum class EdgeOrientation { Directed, Undirected };

struct PairIntersection {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  // Shared edges weighted by 1/c(e): the expected number of shared unit
  // strands when each path picks one of the c(e) parallel strands uniformly.
  double strand_edges = 0.0;
};

// Counts shared vertices and edges of two paths with O(|a| + |b|) work per
// call, reusing stamp arrays sized to the network.
class IntersectionCounter {
public:
  explicit IntersectionCounter(const Network& net)
      : net_(&net),
        vertex_mark_(net.vertex_count(), 0),
        forward_mark_(net.edge_count(), 0),
        backward_mark_(net.edge_count(), 0) {}

  PairIntersection operator()(const SimplePath& a, const SimplePath& b,
                              EdgeOrientation orientation = EdgeOrientation::Directed) {
    if (++stamp_ == 0) {
      std::fill(vertex_mark_.begin(), vertex_mark_.end(), 0);
      std::fill(forward_mark_.begin(), forward_mark_.end(), 0);
      std::fill(backward_mark_.begin(), backward_mark_.end(), 0);
      stamp_ = 1;
    }
    const bool directed = orientation == EdgeOrientation::Directed;
    for (std::size_t i = 0; i < a.vertices.size(); ++i) {
      vertex_mark_.at(checked(a.vertices[i])) = stamp_;
      if (i + 1 < a.vertices.size()) {
        const auto [e, fwd] = step(a.vertices[i], a.vertices[i + 1]);
        ((fwd || !directed) ? forward_mark_ : backward_mark_)[e] = stamp_;
      }
    }
    PairIntersection r;
    for (std::size_t i = 0; i < b.vertices.size(); ++i) {
      if (vertex_mark_[checked(b.vertices[i])] == stamp_) ++r.vertices;
      if (i + 1 < b.vertices.size()) {
        const auto [e, fwd] = step(b.vertices[i], b.vertices[i + 1]);
        if (((fwd || !directed) ? forward_mark_ : backward_mark_)[e] == stamp_) {
          ++r.edges;
          r.strand_edges += 1.0 / net_->edge(e).conductance;
        }
      }
    }
    return r;
  }

private:
  VertexId checked(VertexId v) const {
    if (!net_->contains(v)) throw InputError("path vertex " + std::to_string(v) + " not in graph");
    return v;
  }

  std::pair<EdgeId, bool> step(VertexId x, VertexId y) const {
    const auto e = net_->find_edge(x, y);
    if (!e)
      throw InputError("path step (" + std::to_string(x) + "," + std::to_string(y) +
                       ") is not an edge of the graph");
    return {*e, net_->edge(*e).u == x};
  }

  const Network* net_;
  std::vector<std::uint32_t> vertex_mark_, forward_mark_, backward_mark_;
  std::uint32_t stamp_ = 0;
};

// Number of oriented edges (x,y) traversed by both paths.
inline std::size_t edge_intersection(const Network& net, const SimplePath& a, const SimplePath& b,
                                     EdgeOrientation orientation = EdgeOrientation::Directed) {
  return IntersectionCounter(net)(a, b, orientation).edges;
}

// Number of vertices visited by both paths.
inline std::size_t vertex_intersection(const Network& net, const SimplePath& a,
                                       const SimplePath& b) {
  return IntersectionCounter(net)(a, b).vertices;
}

struct ExpectedIntersection {
  double edge = 0.0;    // E|a n b|_E = sum_e p(e)^2 / c(e)
  double vertex = 0.0;  // E|a n b|_V = sum_v g(v)^2
};

// Expectations over two independent paths, from exact (or empirical)
// probabilities. On unit conductances the edge term is plainly sum p(e)^2;
// a merged edge of conductance c contributes c strands carrying p/c each.
inline ExpectedIntersection expected_intersection_exact(const VisitProfile& profile) {
  ExpectedIntersection r;
  const auto edges = profile.network->edges();
  for (EdgeId e = 0; e < edges.size(); ++e) {
    const double f = profile.forward[e], b = profile.backward[e];
    r.edge += (f * f + b * b) / edges[e].conductance;
  }
  for (double g : profile.visit) r.vertex += g * g;
  return r;
}

struct MonteCarloIntersection {
  Estimate edge;         // strand-weighted, comparable to ExpectedIntersection::edge
  Estimate vertex;
  Estimate edge_count;   // raw |a n b|_E over merged edges
  std::size_t pairs = 0;
  std::uint64_t seed = 0;
};

// Sample means over independent path pairs. Pair i is drawn from stream
// i / kChunkSize, so the result depends only on (kernel, pairs, seed).
inline MonteCarloIntersection expected_intersection_mc(
    const PathKernel& kernel, std::size_t pairs, std::uint64_t seed,
    unsigned workers = default_worker_count(),
    EdgeOrientation orientation = EdgeOrientation::Directed) {
  if (pairs < 2) throw InputError("need at least 2 path pairs");
  struct Acc {
    detail::Moments edge, vertex, count;
  };
  const Acc acc = parallel_chunks<Acc>(
      pairs, workers,
      [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        CounterRng rng(seed, chunk);
        IntersectionCounter counter(kernel.network());
        Acc a;
        for (std::size_t i = begin; i < end; ++i) {
          const SimplePath p = sample_path(kernel, rng);
          const SimplePath q = sample_path(kernel, rng);
          const PairIntersection x = counter(p, q, orientation);
          a.edge.add(x.strand_edges);
          a.vertex.add(static_cast<double>(x.vertices));
          a.count.add(static_cast<double>(x.edges));
        }
        return a;
      },
      [](Acc& total, const Acc& part) {
        total.edge.merge(part.edge);
        total.vertex.merge(part.vertex);
        total.count.merge(part.count);
      });
  return {acc.edge.estimate(), acc.vertex.estimate(), acc.count.estimate(), pairs, seed};
}

// F(u,v) = P[(u,v) in path] - P[(v,u) in path]; strength is the root
// divergence.
inline Flow flow_from_measure(const VisitProfile& profile) {
  std::vector<double> values(profile.forward.size());
  for (std::size_t e = 0; e < values.size(); ++e)
    values[e] = profile.forward[e] - profile.backward[e];
  const Network& net = *profile.network;
  double root_out = 0.0;
  for (const auto& inc : net.neighbors(net.root())) {
    const bool fwd = net.edge(inc.edge).u == net.root();
    root_out += fwd ? values[inc.edge] : -values[inc.edge];
  }
  return Flow(profile.network, std::move(values), root_out);
}

// Measure obtained by reweighting every kernel row with Dirichlet noise of
// the given concentration: q_i ~ q_i * Gamma(concentration), renormalized.
// The support, hence acyclicity, is unchanged.
inline PathKernel perturb_kernel(const PathKernel& kernel, CounterRng& rng,
                                 double concentration = 2.0) {
  PathKernel out = kernel;
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> w;
  for (VertexId u = 0; u < kernel.network().vertex_count(); ++u) {
    const auto row = kernel.row(u);
    if (row.empty()) continue;
    w.resize(row.size());
    double total = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      w[i] = row[i].probability * std::max(gamma(rng), 1e-300);
      total += w[i];
    }
    for (double& x : w) x /= total;
    out.reweight_row(u, w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checks

struct CheckResult {
  std::string name;
  bool passed = false;
  // rhs + tolerance - lhs for inequalities; nonnegative iff passed.
  double slack = 0.0;
  std::string detail;
};

inline CheckResult make_check(std::string name, double slack, std::string detail = {}) {
  return {std::move(name), slack >= 0.0, slack, std::move(detail)};
}

inline bool is_terminal(const Network& net, VertexId v) {
  return v == net.root() || (net.sink() && v == *net.sink());
}

// |div F| <= tol off {root, sink} and div F(root) > 0.
inline CheckResult divergence_check(const std::string& name, const Flow& flow, double tol) {
  const Network& net = flow.network();
  double worst = 0.0;
  VertexId where = net.root();
  for (VertexId v = 0; v < net.vertex_count(); ++v) {
    if (is_terminal(net, v)) continue;
    const double d = std::abs(divergence(flow, v));
    if (d > worst) {
      worst = d;
      where = v;
    }
  }
  const double root_div = divergence(flow, net.root());
  CheckResult c = make_check(name, tol - worst,
                             "max interior |div| " + std::to_string(worst) + " at vertex " +
                                 std::to_string(where) + ", root div " + std::to_string(root_div));
  if (!(root_div > 0.0)) {
    c.passed = false;
    c.slack = std::min(c.slack, root_div);
  }
  return c;
}

// F(u, root) <= epsilon for every neighbor u.
inline CheckResult root_inflow_check(const std::string& name, const Flow& flow,
                                     double epsilon = kFlowEpsilon) {
  const Network& net = flow.network();
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& inc : net.neighbors(net.root()))
    worst = std::max(worst, flow.along(inc.edge, inc.neighbor));
  if (net.neighbors(net.root()).empty()) worst = 0.0;
  return make_check(name, epsilon - worst, "max F(u,root) " + std::to_string(worst));
}

inline CheckResult loop_check(const std::string& name, const Flow& flow) {
  const LoopCheck lc = check_no_positive_loops(flow);
  CheckResult c{name, lc.acyclic, lc.acyclic ? 0.0 : -1.0, {}};
  if (!lc.acyclic) {
    c.detail = "cycle";
    for (VertexId v : lc.cycle) c.detail += " " + std::to_string(v);
  }
  return c;
}

// Rows of Q sum to 1 where f > 0.
inline CheckResult kernel_row_check(const PathKernel& kernel, double tol) {
  double worst = 0.0;
  for (VertexId u = 0; u < kernel.network().vertex_count(); ++u) {
    const auto row = kernel.row(u);
    if (row.empty()) continue;
    double s = 0.0;
    for (const auto& e : row) s += e.probability;
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return make_check("kernel_rows_stochastic", tol - worst,
                    "max |row sum - 1| " + std::to_string(worst));
}

// g(v) <= f(v) everywhere, with f read as throughput at the sink.
inline CheckResult visit_bound_check(const VisitProfile& profile, const Flow& flow, double tol) {
  double slack = std::numeric_limits<double>::infinity();
  for (VertexId v = 0; v < profile.visit.size(); ++v)
    slack = std::min(slack, throughput(flow, v) + tol - profile.visit[v]);
  return make_check("visit_le_outflow", slack);
}

// g(v) = f(v) wherever f(v) > 0; holds on wired exhaustions.
inline CheckResult visit_equality_check(const VisitProfile& profile, const Flow& flow, double tol) {
  double worst = 0.0;
  for (VertexId v = 0; v < profile.visit.size(); ++v) {
    const double f = throughput(flow, v);
    if (f > kFlowEpsilon) worst = std::max(worst, std::abs(f - profile.visit[v]));
  }
  return make_check("visit_eq_outflow", tol - worst, "max |g - f| " + std::to_string(worst));
}

// P[(u,v) in path] <= F(u,v) on every positive-flow edge.
inline CheckResult traversal_bound_check(const VisitProfile& profile, const Flow& flow, double tol) {
  double slack = std::numeric_limits<double>::infinity();
  for (EdgeId e = 0; e < profile.forward.size(); ++e) {
    const double x = flow.values()[e];
    if (x > kFlowEpsilon) slack = std::min(slack, x + tol - profile.forward[e]);
    if (-x > kFlowEpsilon) slack = std::min(slack, -x + tol - profile.backward[e]);
  }
  if (slack == std::numeric_limits<double>::infinity()) slack = tol;
  return make_check("traversal_le_flow", slack);
}

// Flow reconstructed from a measure: zero interior divergence, positive root
// divergence, and directed energy at most twice the expected edge
// intersection.
inline std::vector<CheckResult> sit_energy_bound_check(const VisitProfile& profile,
                                                       const Flow& flow,
                                                       const CheckTolerances& tol = {}) {
  const ExpectedIntersection ex = expected_intersection_exact(profile);
  const Flow rebuilt = flow_from_measure(profile);
  std::vector<CheckResult> out;
  out.push_back(divergence_check("measure_flow_divergence", rebuilt, tol.divergence));
  const double rebuilt_energy = directed_energy(rebuilt);
  out.push_back(make_check("measure_flow_energy", 2.0 * ex.edge + tol.energy - rebuilt_energy,
                           "directed energy " + std::to_string(rebuilt_energy) + " vs 2*E_edge " +
                               std::to_string(2.0 * ex.edge)));
  const double e = energy(flow);
  out.push_back(make_check("edge_sit_energy", e + tol.energy - ex.edge,
                           "E_edge " + std::to_string(ex.edge) + " vs energy " + std::to_string(e)));
  const double de = directed_energy(flow);
  out.push_back(make_check("edge_sit_directed_energy", de + tol.energy - ex.edge,
                           "E_edge " + std::to_string(ex.edge) + " vs directed energy " +
                               std::to_string(de)));
  return out;
}

// Sum over ordered adjacent pairs (u,v) of deg(v) F(u,v)^2 / c(u,v), with
// deg the multigraph degree.
inline double degree_weighted_energy(const Flow& flow) {
  const Network& net = flow.network();
  const auto edges = net.edges();
  double s = 0.0;
  for (EdgeId e = 0; e < edges.size(); ++e) {
    const double x = flow.values()[e];
    s += (net.weighted_degree(edges[e].u) + net.weighted_degree(edges[e].v)) * x * x /
         edges[e].conductance;
  }
  return s;
}

// E_vertex <= d * directed energy (Cauchy-Schwarz with a degree bound d) and
// E_vertex <= degree-weighted energy.
inline std::vector<CheckResult> vertex_bound_check(const VisitProfile& profile, const Flow& flow,
                                                   double max_degree,
                                                   const CheckTolerances& tol = {}) {
  const ExpectedIntersection ex = expected_intersection_exact(profile);
  const double bound = max_degree * directed_energy(flow);
  const double weighted = degree_weighted_energy(flow);
  return {make_check("vertex_sit_max_degree", bound + tol.energy - ex.vertex,
                     "E_vertex " + std::to_string(ex.vertex) + " vs d*directed energy " +
                         std::to_string(bound) + " (d=" + std::to_string(max_degree) + ")"),
          make_check("vertex_sit_degree_weighted", weighted + tol.energy - ex.vertex,
                     "E_vertex " + std::to_string(ex.vertex) + " vs degree-weighted energy " +
                         std::to_string(weighted))};
}

// ---------------------------------------------------------------------------
// Report

struct IntersectionReport {
  std::string family;
  std::optional<int> radius;
  std::string graph_hash;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  double max_degree = 0.0;           // over all vertices, sink included
  double max_interior_degree = 0.0;  // sink excluded
  double e_edge = 0.0;
  double e_vertex = 0.0;
  std::optional<MonteCarloIntersection> monte_carlo;
  double energy_forward = 0.0;
  double directed_energy_forward = 0.0;
  double energy_reconstructed = 0.0;
  double directed_energy_reconstructed = 0.0;
  std::optional<double> escape_mass;  // hitting-flow normalization, when computed
  std::vector<VertexId> interior_absorbers;
  std::vector<CheckResult> checks;

  std::size_t checks_passed() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; }));
  }
  bool all_passed() const { return checks_passed() == checks.size(); }
};

struct ReportOptions {
  std::size_t mc_pairs = 0;  // 0 = exact only
  std::uint64_t seed = 0;
  unsigned workers = default_worker_count();
  CheckTolerances tol;
};

// Builds the kernel of `flow` and runs every check. A positive-flow loop
// propagates as CycleError.
inline IntersectionReport build_report(const Flow& flow, const ReportOptions& options = {}) {
  const Network& net = flow.network();
  IntersectionReport r;
  r.graph_hash = graph_hash(net);
  r.vertices = net.vertex_count();
  r.edges = net.edge_count();
  r.max_degree = net.max_weighted_degree();
  for (VertexId v = 0; v < net.vertex_count(); ++v)
    if (!net.sink() || v != *net.sink())
      r.max_interior_degree = std::max(r.max_interior_degree, net.weighted_degree(v));

  const PathKernel kernel = build_kernel(flow);
  const VisitProfile profile = visit_probability(kernel);
  const ExpectedIntersection ex = expected_intersection_exact(profile);
  const Flow rebuilt = flow_from_measure(profile);
  r.e_edge = ex.edge;
  r.e_vertex = ex.vertex;
  r.energy_forward = energy(flow);
  r.directed_energy_forward = directed_energy(flow);
  r.energy_reconstructed = energy(rebuilt);
  r.directed_energy_reconstructed = directed_energy(rebuilt);
  r.interior_absorbers.assign(kernel.interior_absorbers().begin(),
                              kernel.interior_absorbers().end());
  if (options.mc_pairs > 0)
    r.monte_carlo = expected_intersection_mc(kernel, options.mc_pairs, options.seed, options.workers);

  const auto& tol = options.tol;
  r.checks.push_back(loop_check("no_positive_loops", flow));
  r.checks.push_back(root_inflow_check("no_flow_into_root", flow));
  r.checks.push_back(divergence_check("flow_divergence", flow, tol.divergence));
  r.checks.push_back(kernel_row_check(kernel, tol.row_sum));
  r.checks.push_back(visit_bound_check(profile, flow, tol.visit));
  r.checks.push_back(visit_equality_check(profile, flow, tol.visit));
  r.checks.push_back(traversal_bound_check(profile, flow, tol.visit));
  for (auto& c : sit_energy_bound_check(profile, flow, tol)) r.checks.push_back(std::move(c));
  for (auto& c : vertex_bound_check(profile, flow, r.max_degree, tol))
    r.checks.push_back(std::move(c));
  r.checks.push_back(make_check("vertex_ge_edge", ex.vertex - ex.edge + 1e-12));
  return r;
}

}  // namespace sitnet
