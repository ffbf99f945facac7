#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "sitnet/scan.hpp"

using namespace sitnet;

namespace {

std::vector<int> radii(int from, int to, int step = 1) {
  std::vector<int> r;
  for (int x = from; x <= to; x += step) r.push_back(x);
  return r;
}

void expect_all_checks(const ScanResult& s) {
  EXPECT_TRUE(s.errors.empty());
  for (const auto& row : s.rows) {
    EXPECT_EQ(row.checks_passed, row.checks_total) << "r=" << row.radius;
    EXPECT_EQ(row.checks_total, 14u);
  }
}

}  // namespace

TEST(ClassifyTrend, GeometricIncrementsStabilize) {
  std::vector<int> r = radii(1, 10);
  std::vector<double> v;
  for (int x : r) v.push_back(2.0 - std::ldexp(1.0, -x));
  const TrendSummary t = classify_trend(r, v);
  EXPECT_EQ(t.trend, Trend::Stabilizing);
  ASSERT_TRUE(t.decay_exponent.has_value());
  EXPECT_GT(*t.decay_exponent, kSummableExponent);
  EXPECT_LT(t.relative_change, kTrendDelta);
}

TEST(ClassifyTrend, LinearGrowthDiverges) {
  std::vector<int> r = radii(4, 20, 4);
  std::vector<double> v;
  for (int x : r) v.push_back(0.5 * x);
  const TrendSummary t = classify_trend(r, v);
  EXPECT_EQ(t.trend, Trend::Diverging);
  EXPECT_NEAR(*t.decay_exponent, 0.0, 1e-12);
}

TEST(ClassifyTrend, LogarithmicGrowthDiverges) {
  std::vector<int> r = radii(10, 100, 10);
  std::vector<double> v;
  for (int x : r) v.push_back(std::log(x));
  const TrendSummary t = classify_trend(r, v);
  EXPECT_LT(t.relative_change, kTrendDelta * 10);
  EXPECT_NEAR(*t.decay_exponent, 1.0, 0.05);
  EXPECT_EQ(t.trend, Trend::Diverging);
}

TEST(ClassifyTrend, ConstantAndShortColumns) {
  EXPECT_EQ(classify_trend({1, 2, 3}, {5.0, 5.0, 5.0}).trend, Trend::Stabilizing);
  EXPECT_EQ(classify_trend({1, 2}, {1.0, 2.0}).trend, Trend::Inconclusive);
  EXPECT_EQ(classify_trend({1, 2, 3}, {1.0, 3.0, 2.0}).trend, Trend::Inconclusive);
  EXPECT_STREQ(trend_label(Trend::Stabilizing), "edge-SIT trend");
  EXPECT_STREQ(trend_label(Trend::Diverging), "diverging");
  EXPECT_STREQ(trend_label(Trend::Inconclusive), "inconclusive");
}

TEST(SitScan, DiamondEdgeStabilizesVertexDiverges) {
  const ScanResult s = sit_scan(GraphFamily::diamond(), radii(2, 12));
  expect_all_checks(s);
  ASSERT_EQ(s.rows.size(), 11u);
  for (const auto& row : s.rows) {
    const double closed = 2.0 - std::ldexp(1.0, 1 - row.radius);
    EXPECT_NEAR(row.r_eff, closed, 1e-9);
    EXPECT_NEAR(row.e_edge, closed, 1e-9);
    EXPECT_NEAR(row.e_vertex, row.radius + 2.0 - std::ldexp(1.0, -row.radius), 1e-9);
  }
  EXPECT_EQ(s.e_edge_trend.trend, Trend::Stabilizing);
  EXPECT_EQ(s.r_eff_trend.trend, Trend::Stabilizing);
  EXPECT_EQ(s.e_vertex_trend.trend, Trend::Diverging);
  EXPECT_EQ(s.family, "diamond");
}

TEST(SitScan, LineDiverges) {
  const ScanResult s = sit_scan(GraphFamily::lattice(1), radii(4, 64, 4));
  expect_all_checks(s);
  for (const auto& row : s.rows) {
    EXPECT_NEAR(row.r_eff, row.radius / 2.0, 1e-9 * row.radius);
    EXPECT_NEAR(row.e_edge, row.radius / 2.0, 1e-9 * row.radius);
  }
  EXPECT_EQ(s.e_edge_trend.trend, Trend::Diverging);
}

TEST(SitScan, ThreeDimensionalLatticeStabilizes) {
  const ScanResult s = sit_scan(GraphFamily::lattice(3), radii(4, 14, 2));
  expect_all_checks(s);
  for (std::size_t i = 1; i < s.rows.size(); ++i) EXPECT_GT(s.rows[i].e_edge, s.rows[i - 1].e_edge);
  EXPECT_EQ(s.e_edge_trend.trend, Trend::Stabilizing);
  EXPECT_EQ(s.r_eff_trend.trend, Trend::Stabilizing);
}

TEST(SitScan, PlaneDiverges) {
  const ScanResult s = sit_scan(GraphFamily::lattice(2), radii(4, 40, 4));
  expect_all_checks(s);
  EXPECT_EQ(s.e_edge_trend.trend, Trend::Diverging);
}

TEST(SitScan, TreeStabilizes) {
  const ScanResult s = sit_scan(GraphFamily::binary_tree(), radii(2, 12));
  expect_all_checks(s);
  EXPECT_EQ(s.e_edge_trend.trend, Trend::Stabilizing);
}

TEST(SitScan, RejectsBadRadii) {
  EXPECT_THROW(sit_scan(GraphFamily::diamond(), {3, 3}), InputError);
  EXPECT_THROW(sit_scan(GraphFamily::diamond(), {4, 2}), InputError);
}

TEST(SitScan, OutOfRangeRadiusIsRecorded) {
  const ScanResult s = sit_scan(GraphFamily::diamond(), {0, 1, 2});
  ASSERT_EQ(s.errors.size(), 1u);
  EXPECT_EQ(s.errors[0].radius, 0);
  EXPECT_EQ(s.rows.size(), 2u);
}

TEST(SitScan, MonteCarloColumn) {
  ScanOptions opts;
  opts.mc_pairs = 20000;
  opts.seed = 4;
  const ScanResult s = sit_scan(GraphFamily::diamond(), {2, 3}, opts);
  for (const auto& row : s.rows) {
    ASSERT_TRUE(row.e_edge_mc.has_value());
    EXPECT_NEAR(row.e_edge_mc->mean, row.e_edge, 4 * row.e_edge_mc->standard_error);
  }
}

TEST(ScanCsv, Format) {
  const ScanResult s = sit_scan(GraphFamily::path(), {1, 2});
  std::ostringstream out;
  write_scan_csv(out, s);
  EXPECT_EQ(out.str(),
            "r,R_eff,E_edge,E_vertex,E_edge_mc,E_edge_mc_se,checks_passed,checks_total\n"
            "1,1,1,2,nan,nan,14,14\n"
            "2,2,2,3,nan,nan,14,14\n");
}
