#include <gtest/gtest.h>

#include <cmath>

#include <json.hpp>

#include "oracle/path_enumeration.hpp"
#include "sitnet/generators.hpp"
#include "sitnet/intersection.hpp"
#include "sitnet/report.hpp"

using namespace sitnet;

namespace {

std::shared_ptr<const Network> share(Network net) {
  return std::make_shared<const Network>(std::move(net));
}

Flow current(Network net) { return unit_current_flow(share(std::move(net)), 1e-12); }

const CheckResult& find_check(const std::vector<CheckResult>& checks, const std::string& name) {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::runtime_error("no check " + name);
}

}  // namespace

TEST(PairIntersection, IdenticalPaths) {
  const Network net = make_path_graph(2);
  const SimplePath a{{0, 1, 2}};
  EXPECT_EQ(edge_intersection(net, a, a), 2u);
  EXPECT_EQ(vertex_intersection(net, a, a), 3u);
}

TEST(PairIntersection, DiamondBranches) {
  const Network net = make_diamond_graph(2);
  const VertexId s0 = 0, s1 = diamond_skeleton_id(1), s2 = diamond_skeleton_id(2);
  const SimplePath a{{s0, diamond_middle_id(1, 0), s1, diamond_middle_id(2, 0), s2}};
  const SimplePath b{{s0, diamond_middle_id(1, 1), s1, diamond_middle_id(2, 1), s2}};
  const SimplePath c{{s0, diamond_middle_id(1, 0), s1, diamond_middle_id(2, 3), s2}};
  EXPECT_EQ(edge_intersection(net, a, b), 0u);
  EXPECT_EQ(vertex_intersection(net, a, b), 3u);
  EXPECT_EQ(edge_intersection(net, a, c), 2u);
  EXPECT_EQ(vertex_intersection(net, a, c), 4u);
  EXPECT_EQ(edge_intersection(net, a, a), 4u);
}

TEST(PairIntersection, Orientation) {
  const Network net = make_path_graph(3);
  const SimplePath fwd{{0, 1, 2, 3}};
  const SimplePath back{{3, 2, 1}};
  EXPECT_EQ(edge_intersection(net, fwd, back), 0u);
  EXPECT_EQ(edge_intersection(net, fwd, back, EdgeOrientation::Undirected), 2u);
  EXPECT_EQ(vertex_intersection(net, fwd, back), 3u);
}

TEST(PairIntersection, StrandWeighting) {
  // the merged last-level tree edge has two strands
  const Network net = make_binary_tree(1);
  IntersectionCounter count(net);
  const SimplePath p{{0, tree_sink_id(1)}};
  const PairIntersection x = count(p, p);
  EXPECT_EQ(x.edges, 1u);
  EXPECT_DOUBLE_EQ(x.strand_edges, 0.5);
}

TEST(PairIntersection, RejectsInvalidPaths) {
  const Network net = make_path_graph(3);
  EXPECT_THROW(edge_intersection(net, {{0, 2}}, {{0, 1}}), InputError);
  EXPECT_THROW(vertex_intersection(net, {{0, 7}}, {{0, 1}}), InputError);
}

TEST(PairIntersection, CounterReuse) {
  const Network net = make_diamond_graph(1);
  IntersectionCounter count(net);
  const SimplePath a{{0, 1, 3}}, b{{0, 2, 3}};
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(count(a, b).edges, 0u);
    EXPECT_EQ(count(a, a).edges, 2u);
  }
}

TEST(ExpectedIntersection, PathIsDeterministic) {
  for (std::uint32_t l : {1u, 4u, 20u}) {
    const auto ex = expected_intersection_exact(visit_probability(build_kernel(current(make_path_graph(l)))));
    EXPECT_NEAR(ex.edge, l, 1e-12);
    EXPECT_NEAR(ex.vertex, l + 1, 1e-12);
  }
}

TEST(ExpectedIntersection, DiamondClosedForm) {
  const auto ex = expected_intersection_exact(visit_probability(build_kernel(current(make_diamond_graph(3)))));
  EXPECT_NEAR(ex.edge, 1.75, 1e-12);
  EXPECT_NEAR(ex.vertex, 4.875, 1e-12);
  for (int n = 1; n <= 10; ++n) {
    const auto e = expected_intersection_exact(visit_probability(build_kernel(current(make_diamond_graph(n)))));
    EXPECT_NEAR(e.edge, 2.0 - std::ldexp(1.0, 1 - n), 1e-9);
    EXPECT_NEAR(e.vertex, n + 1 + 1.0 - std::ldexp(1.0, -n), 1e-9);
  }
}

TEST(ExpectedIntersection, MatchesEnumeration) {
  std::vector<Network> nets{make_diamond_graph(1), make_diamond_graph(2), make_diamond_graph(3),
                            make_lattice_ball(2, 3)};
  for (int d = 1; d <= 4; ++d) nets.push_back(make_binary_tree(d));
  for (auto& net : nets) {
    const PathKernel k = build_kernel(current(std::move(net)));
    const auto ex = expected_intersection_exact(visit_probability(k));
    const auto brute = oracle::brute_force(k.network(), oracle::enumerate_paths(k));
    EXPECT_NEAR(ex.edge, brute.e_edge, 1e-12);
    EXPECT_NEAR(ex.vertex, brute.e_vertex, 1e-12);
  }
}

TEST(ExpectedIntersection, TreeEqualsEnergy) {
  for (int d = 1; d <= 12; ++d) {
    const auto ex = expected_intersection_exact(visit_probability(build_kernel(current(make_binary_tree(d)))));
    EXPECT_NEAR(ex.edge, 1.0 - std::ldexp(1.0, -d), 1e-9);
  }
}

TEST(MonteCarlo, AgreesWithExact) {
  const PathKernel k = build_kernel(current(make_diamond_graph(3)));
  const auto mc = expected_intersection_mc(k, 100000, 7);
  EXPECT_EQ(mc.pairs, 100000u);
  EXPECT_EQ(mc.seed, 7u);
  EXPECT_NEAR(mc.edge.mean, 1.75, 4 * mc.edge.standard_error);
  EXPECT_NEAR(mc.vertex.mean, 4.875, 4 * mc.vertex.standard_error);
  EXPECT_DOUBLE_EQ(mc.edge.mean, mc.edge_count.mean);

  const PathKernel tree = build_kernel(current(make_binary_tree(5)));
  const auto mt = expected_intersection_mc(tree, 50000, 3);
  EXPECT_NEAR(mt.edge.mean, 1.0 - 1.0 / 32, 4 * mt.edge.standard_error);
}

TEST(MonteCarlo, PathHasNoVariance) {
  const PathKernel k = build_kernel(current(make_path_graph(6)));
  const auto mc = expected_intersection_mc(k, 10, 1);
  EXPECT_EQ(mc.edge.mean, 6.0);
  EXPECT_EQ(mc.vertex.mean, 7.0);
  EXPECT_EQ(mc.edge.standard_error, 0.0);
}

TEST(MonteCarlo, Reproducible) {
  const PathKernel k = build_kernel(current(make_lattice_ball(2, 5)));
  const auto a = expected_intersection_mc(k, 2 * kChunkSize + 5, 9, 1);
  const auto b = expected_intersection_mc(k, 2 * kChunkSize + 5, 9, 3);
  EXPECT_EQ(a.edge.mean, b.edge.mean);
  EXPECT_EQ(a.vertex.mean, b.vertex.mean);
  EXPECT_EQ(a.edge.standard_error, b.edge.standard_error);
  EXPECT_NE(a.edge.mean, expected_intersection_mc(k, 2 * kChunkSize + 5, 10, 1).edge.mean);
}

TEST(MonteCarlo, NeedsTwoPairs) {
  const PathKernel k = build_kernel(current(make_path_graph(2)));
  EXPECT_THROW(expected_intersection_mc(k, 1, 0), InputError);
  EXPECT_THROW(expected_intersection_mc(k, 0, 0), InputError);
}

TEST(FlowFromMeasure, ExactProfileReproducesFlow) {
  for (auto net : {make_diamond_graph(4), make_lattice_ball(3, 4), make_binary_tree(6)}) {
    const Flow f = current(std::move(net));
    const Flow rebuilt = flow_from_measure(visit_probability(build_kernel(f)));
    EXPECT_NEAR(rebuilt.strength(), 1.0, 1e-9);
    for (std::size_t e = 0; e < f.values().size(); ++e)
      EXPECT_NEAR(rebuilt.values()[e], f.values()[e], 1e-9);
  }
}

TEST(FlowFromMeasure, SampledProfileWithinBinomialError) {
  const Flow f = current(make_diamond_graph(2));
  const std::size_t n = 100000;
  const Flow rebuilt = flow_from_measure(empirical_profile(build_kernel(f), n, 21));
  EXPECT_DOUBLE_EQ(rebuilt.strength(), 1.0);
  for (std::size_t e = 0; e < f.values().size(); ++e) {
    const double p = std::abs(f.values()[e]);
    EXPECT_NEAR(rebuilt.values()[e], f.values()[e], 4 * std::sqrt(p * (1 - p) / n) + 1e-12);
  }
}

TEST(Checks, EdgeBoundHoldsOnFamilies) {
  for (auto net : {make_diamond_graph(6), make_binary_tree(8), make_path_graph(9), make_lattice_ball(3, 6)}) {
    const Flow f = current(std::move(net));
    const VisitProfile p = visit_probability(build_kernel(f));
    for (const auto& c : sit_energy_bound_check(p, f)) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
    EXPECT_TRUE(visit_bound_check(p, f, 1e-9).passed);
    EXPECT_TRUE(visit_equality_check(p, f, 1e-9).passed);
    EXPECT_TRUE(traversal_bound_check(p, f, 1e-9).passed);
  }
}

TEST(Checks, VertexBoundHoldsOnFamilies) {
  for (auto net : {make_lattice_ball(3, 8), make_diamond_graph(8), make_path_graph(5)}) {
    const double d = net.max_weighted_degree();
    const Flow f = current(std::move(net));
    const VisitProfile p = visit_probability(build_kernel(f));
    for (const auto& c : vertex_bound_check(p, f, d)) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
  }
}

TEST(Checks, PathDegreeWeightedEnergy) {
  // interior degree 2, root and sink degree 1: 3 + 4 (L - 2) + 3
  const Flow f = current(make_path_graph(5));
  EXPECT_NEAR(degree_weighted_energy(f), 18.0, 1e-12);
}

TEST(Checks, DetectFailures) {
  NetworkBuilder b(4);
  b.add_edge(0, 1).add_edge(1, 2).add_edge(2, 3).add_edge(1, 3);
  auto net = share(b.root(0).sink(3).build());
  std::vector<double> values(net->edge_count(), 0.0);
  values[*net->find_edge(0, 1)] = 1.0;
  values[*net->find_edge(1, 2)] = 0.6;  // 0.1 leaks at vertex 2
  values[*net->find_edge(2, 3)] = 0.5;
  values[*net->find_edge(1, 3)] = 0.4;
  const Flow leaky(net, values, 1.0);
  EXPECT_FALSE(divergence_check("flow_divergence", leaky, 1e-8).passed);
  EXPECT_TRUE(loop_check("no_positive_loops", leaky).passed);

  NetworkBuilder c(3);
  c.add_edge(0, 1).add_edge(1, 2).add_edge(0, 2);
  const Flow loop(share(c.root(0).sink(2).build()), {1.0, -1.0, 1.0}, 1.0);
  const CheckResult lc = loop_check("no_positive_loops", loop);
  EXPECT_FALSE(lc.passed);
  EXPECT_NE(lc.detail.find("cycle"), std::string::npos);
  EXPECT_FALSE(root_inflow_check("no_flow_into_root", loop).passed);
}

TEST(Perturbation, MeasuresKeepUnitFlowAndBound) {
  for (auto net : {make_diamond_graph(5), make_lattice_ball(2, 6), make_lattice_ball(3, 4)}) {
    const Flow f = current(std::move(net));
    const double r_eff = energy(f);
    const PathKernel k = build_kernel(f);
    CounterRng rng(77, f.network().vertex_count());
    for (int trial = 0; trial < 20; ++trial) {
      const PathKernel q = perturb_kernel(k, rng);
      EXPECT_TRUE(kernel_row_check(q, 1e-12).passed);
      const VisitProfile p = visit_probability(q);
      const Flow theta = flow_from_measure(p);
      EXPECT_TRUE(divergence_check("measure_flow_divergence", theta, 1e-9).passed);
      EXPECT_NEAR(theta.strength(), 1.0, 1e-12);
      const auto ex = expected_intersection_exact(p);
      EXPECT_GE(ex.edge + 1e-12, energy(theta));
      EXPECT_GE(energy(theta) + 1e-9, r_eff);
      EXPECT_TRUE(find_check(sit_energy_bound_check(p, theta), "measure_flow_energy").passed);
    }
  }
}

TEST(Report, DiamondReportPassesAndSerializes) {
  ReportOptions opts;
  opts.mc_pairs = 2000;
  opts.seed = 5;
  IntersectionReport r = build_report(current(make_diamond_graph(3)), opts);
  EXPECT_EQ(r.checks.size(), 14u);
  for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
  EXPECT_TRUE(r.all_passed());
  EXPECT_NEAR(r.e_edge, 1.75, 1e-12);
  EXPECT_NEAR(r.e_vertex, 4.875, 1e-12);
  EXPECT_DOUBLE_EQ(r.max_degree, 12.0);
  ASSERT_TRUE(r.monte_carlo.has_value());

  const auto doc = nlohmann::json::parse(report_to_json(r));
  EXPECT_EQ(doc["format"], "sitnet-report-v1");
  EXPECT_TRUE(doc["family"].is_null());
  EXPECT_EQ(doc["checks_total"], 14);
  EXPECT_EQ(doc["checks_passed"], 14);
  EXPECT_EQ(doc["vertices"], 18);
  EXPECT_EQ(doc["graph_hash"], graph_hash(make_diamond_graph(3)));
  EXPECT_EQ(doc["monte_carlo"]["pairs"], 2000);
  EXPECT_NEAR(doc["E_edge"].get<double>(), 1.75, 1e-12);

  r.family = "diamond";
  r.radius = 3;
  const auto named = nlohmann::json::parse(report_to_json(r));
  EXPECT_EQ(named["family"], "diamond");
  EXPECT_EQ(named["radius"], 3);
}

TEST(Report, CycleIsRefused) {
  NetworkBuilder c(3);
  c.add_edge(0, 1).add_edge(1, 2).add_edge(0, 2);
  const Flow loop(share(c.root(0).sink(2).build()), {1.0, -1.0, 1.0}, 1.0);
  EXPECT_THROW(build_report(loop), CycleError);
}
