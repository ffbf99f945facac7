#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sitnet/generators.hpp"
#include "sitnet/intersection.hpp"
#include "sitnet/solver.hpp"

namespace sitnet {

// Relative change over the last three radii below which a column counts as
// stabilizing.
inline constexpr double kTrendDelta = 1e-2;
// Increments decaying like r^-alpha are summable for alpha > 1; require a
// margin.
inline constexpr double kSummableExponent = 1.5;

enum class Trend { Stabilizing, Diverging, Inconclusive };

inline const char* trend_label(Trend t) {
  switch (t) {
    case Trend::Stabilizing: return "edge-SIT trend";
    case Trend::Diverging: return "diverging";
    case Trend::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct TrendSummary {
  Trend trend = Trend::Inconclusive;
  double relative_change = 0.0;  // max over the last two increments
  // Fitted decay exponent of the per-radius increment; nullopt when the
  // increments vanish or change sign.
  std::optional<double> decay_exponent;
};

// Heuristic reading of a column of values indexed by increasing radii. Never
// a proof of convergence or divergence.
inline TrendSummary classify_trend(const std::vector<int>& radii, const std::vector<double>& values,
                                   double delta = kTrendDelta) {
  TrendSummary s;
  const std::size_t n = values.size();
  if (n < 3 || radii.size() != n) return s;
  const double r0 = radii[n - 3], r1 = radii[n - 2], r2 = radii[n - 1];
  const double v0 = values[n - 3], v1 = values[n - 2], v2 = values[n - 1];
  const double d1 = v1 - v0, d2 = v2 - v1;
  s.relative_change = std::max(std::abs(d1) / std::abs(v1), std::abs(d2) / std::abs(v2));
  const double scale = std::max({std::abs(v0), std::abs(v1), std::abs(v2)});
  if (std::abs(d1) <= 1e-14 * scale && std::abs(d2) <= 1e-14 * scale) {
    s.trend = Trend::Stabilizing;
    return s;
  }
  const double slope1 = d1 / (r1 - r0), slope2 = d2 / (r2 - r1);
  if (slope1 > 0.0 && slope2 > 0.0) {
    const double m1 = 0.5 * (r0 + r1), m2 = 0.5 * (r1 + r2);
    s.decay_exponent = -std::log(slope2 / slope1) / std::log(m2 / m1);
  }
  bool nondecreasing = true;
  for (std::size_t i = 1; i < n; ++i) nondecreasing = nondecreasing && values[i] >= values[i - 1];

  if (s.decay_exponent && s.relative_change < delta && *s.decay_exponent > kSummableExponent)
    s.trend = Trend::Stabilizing;
  else if (nondecreasing && s.decay_exponent && *s.decay_exponent <= kSummableExponent)
    s.trend = Trend::Diverging;
  return s;
}

struct ScanOptions {
  std::size_t mc_pairs = 0;  // 0 = exact only
  std::uint64_t seed = 0;
  double tol = kDefaultSolverTolerance;
  unsigned workers = default_worker_count();
};

struct ScanRow {
  int radius = 0;
  double r_eff = 0.0;
  double e_edge = 0.0;
  double e_vertex = 0.0;
  std::optional<Estimate> e_edge_mc;
  std::size_t checks_passed = 0;
  std::size_t checks_total = 0;
};

struct ScanError {
  int radius = 0;
  std::string message;
};

struct ScanResult {
  std::string family;
  std::vector<ScanRow> rows;
  std::vector<ScanError> errors;
  TrendSummary r_eff_trend, e_edge_trend, e_vertex_trend;
};

// One exact row per radius (plus Monte Carlo when requested). A failing
// radius is recorded in errors and the scan moves on.
inline ScanResult sit_scan(const GraphFamily& family, const std::vector<int>& radii,
                           const ScanOptions& options = {}) {
  family.validate();
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (radii[i] <= radii[i - 1]) throw InputError("scan radii must be strictly increasing");
  ScanResult result;
  result.family = family.name();
  for (int r : radii) {
    try {
      auto net = std::make_shared<const Network>(exhaustion(family, r));
      const Flow flow = unit_current_flow(net, options.tol);
      ReportOptions ro;
      ro.mc_pairs = options.mc_pairs;
      ro.seed = options.seed;
      ro.workers = options.workers;
      const IntersectionReport rep = build_report(flow, ro);
      ScanRow row;
      row.radius = r;
      row.r_eff = rep.energy_forward;
      row.e_edge = rep.e_edge;
      row.e_vertex = rep.e_vertex;
      if (rep.monte_carlo) row.e_edge_mc = rep.monte_carlo->edge;
      row.checks_passed = rep.checks_passed();
      row.checks_total = rep.checks.size();
      result.rows.push_back(row);
    } catch (const Error& e) {
      result.errors.push_back({r, e.what()});
    }
  }
  std::vector<int> rs;
  std::vector<double> re, ee, ev;
  for (const auto& row : result.rows) {
    rs.push_back(row.radius);
    re.push_back(row.r_eff);
    ee.push_back(row.e_edge);
    ev.push_back(row.e_vertex);
  }
  result.r_eff_trend = classify_trend(rs, re);
  result.e_edge_trend = classify_trend(rs, ee);
  result.e_vertex_trend = classify_trend(rs, ev);
  return result;
}

inline std::string format_g12(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// CSV with header r,R_eff,E_edge,E_vertex,E_edge_mc,E_edge_mc_se,
// checks_passed,checks_total. Monte Carlo columns are nan in exact mode.
inline void write_scan_csv(std::ostream& out, const ScanResult& scan) {
  out << "r,R_eff,E_edge,E_vertex,E_edge_mc,E_edge_mc_se,checks_passed,checks_total\n";
  for (const auto& row : scan.rows) {
    const double nan = std::nan("");
    out << row.radius << ',' << format_g12(row.r_eff) << ',' << format_g12(row.e_edge) << ','
        << format_g12(row.e_vertex) << ','
        << format_g12(row.e_edge_mc ? row.e_edge_mc->mean : nan) << ','
        << format_g12(row.e_edge_mc ? row.e_edge_mc->standard_error : nan) << ','
        << row.checks_passed << ',' << row.checks_total << '\n';
  }
}

}  // namespace sitnet
