#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sitnet/error.hpp"
#include "sitnet/network.hpp"

namespace sitnet {

inline constexpr double kDefaultSolverTolerance = 1e-10;

// Antisymmetric edge function on a Network. One value per undirected edge,
// oriented from edge.u to edge.v; F(v,u) = -F(u,v) by construction.
class Flow {
public:
  Flow(std::shared_ptr<const Network> network, std::vector<double> values, double strength)
      : network_(std::move(network)), values_(std::move(values)), strength_(strength) {
    if (!network_) throw InputError("flow needs a network");
    if (values_.size() != network_->edge_count())
      throw InputError("flow has " + std::to_string(values_.size()) + " values for " +
                       std::to_string(network_->edge_count()) + " edges");
  }

  const Network& network() const noexcept { return *network_; }
  const std::shared_ptr<const Network>& network_ptr() const noexcept { return network_; }
  // Declared amount leaving the root.
  double strength() const noexcept { return strength_; }
  std::span<const double> values() const noexcept { return values_; }

  // F(from, other end of e).
  double along(EdgeId e, VertexId from) const {
    const Edge& edge = network_->edge(e);
    return from == edge.u ? values_[e] : -values_[e];
  }

  // F(a, b); zero when a and b are not adjacent.
  double operator()(VertexId a, VertexId b) const {
    auto e = network_->find_edge(a, b);
    return e ? along(*e, a) : 0.0;
  }

private:
  std::shared_ptr<const Network> network_;
  std::vector<double> values_;
  double strength_;
};

// Voltage-like function on vertices together with solver diagnostics.
struct Potential {
  std::vector<double> values;
  double relative_residual = 0.0;
  std::size_t iterations = 0;

  double operator[](VertexId v) const { return values[v]; }
};

namespace detail {

inline VertexId require_sink(const Network& net) {
  if (!net.sink()) throw InputError("network has no sink");
  return *net.sink();
}

// Solves sum_j c_ij (x_i - x_j) = source_i at every free vertex, with x fixed
// where fixed[i] is set. Jacobi-preconditioned CG on the grounded Laplacian.
inline Potential solve_grounded(const Network& net, const std::vector<std::optional<double>>& fixed,
                                const std::vector<double>& source, double tol) {
  if (!(tol > 0.0)) throw InputError("solver tolerance must be positive");
  const std::size_t n = net.vertex_count();
  std::vector<char> is_free(n);
  std::vector<double> x(n, 0.0), b(n, 0.0), diag(n, 0.0);
  std::size_t free_count = 0;
  for (VertexId v = 0; v < n; ++v) {
    is_free[v] = !fixed[v].has_value();
    if (!is_free[v]) x[v] = *fixed[v];
    else ++free_count;
  }
  for (VertexId v = 0; v < n; ++v) {
    if (!is_free[v]) continue;
    double rhs = source[v];
    for (const auto& inc : net.neighbors(v)) {
      const double c = net.edge(inc.edge).conductance;
      diag[v] += c;
      if (!is_free[inc.neighbor]) rhs += c * x[inc.neighbor];
    }
    b[v] = rhs;
  }

  auto apply = [&](const std::vector<double>& p, std::vector<double>& out) {
    for (VertexId v = 0; v < n; ++v) {
      if (!is_free[v]) {
        out[v] = 0.0;
        continue;
      }
      double s = diag[v] * p[v];
      for (const auto& inc : net.neighbors(v))
        if (is_free[inc.neighbor]) s -= net.edge(inc.edge).conductance * p[inc.neighbor];
      out[v] = s;
    }
  };
  auto dot = [n](const std::vector<double>& a, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * c[i];
    return s;
  };

  Potential result;
  const double b_norm = std::sqrt(dot(b, b));
  if (free_count == 0 || b_norm == 0.0) {
    result.values = std::move(x);
    return result;
  }

  // x_free starts at 0; r = b
  std::vector<double> r = b, z(n, 0.0), p(n, 0.0), ap(n, 0.0);
  for (VertexId v = 0; v < n; ++v)
    if (is_free[v]) z[v] = r[v] / diag[v];
  p = z;
  double rz = dot(r, z);
  const std::size_t cap = 20 * std::max<std::size_t>(n, 1);
  double rel = 1.0;
  std::size_t it = 0;
  while (it < cap) {
    apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0) || !std::isfinite(pap)) break;
    const double alpha = rz / pap;
    for (VertexId v = 0; v < n; ++v) {
      if (!is_free[v]) continue;
      x[v] += alpha * p[v];
      r[v] -= alpha * ap[v];
    }
    ++it;
    rel = std::sqrt(dot(r, r)) / b_norm;
    if (rel <= tol) break;
    for (VertexId v = 0; v < n; ++v)
      if (is_free[v]) z[v] = r[v] / diag[v];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (VertexId v = 0; v < n; ++v)
      if (is_free[v]) p[v] = z[v] + beta * p[v];
  }
  if (!(rel <= tol)) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "conjugate gradient did not reach relative residual %g within %zu iterations "
                  "(last %g)",
                  tol, cap, rel);
    throw NumericalError(msg);
  }

  // report the true residual, not the recursively updated one
  std::vector<double> ax(n, 0.0);
  std::vector<double> x_free(n, 0.0);
  for (VertexId v = 0; v < n; ++v)
    if (is_free[v]) x_free[v] = x[v];
  apply(x_free, ax);
  double res = 0.0;
  for (VertexId v = 0; v < n; ++v)
    if (is_free[v]) res += (b[v] - ax[v]) * (b[v] - ax[v]);
  result.values = std::move(x);
  result.relative_residual = std::sqrt(res) / b_norm;
  result.iterations = it;
  return result;
}

}  // namespace detail

// h(v) = P_v[hit root before sink]: harmonic off {root, sink}, h(root) = 1,
// h(sink) = 0.
inline Potential harmonic_solve(const Network& net, double tol = kDefaultSolverTolerance) {
  const VertexId sink = detail::require_sink(net);
  std::vector<std::optional<double>> fixed(net.vertex_count());
  fixed[net.root()] = 1.0;
  fixed[sink] = 0.0;
  return detail::solve_grounded(net, fixed, std::vector<double>(net.vertex_count(), 0.0), tol);
}

// Current leaving the root when the root is held at 1 and the sink at 0.
inline double escape_current(const Network& net, const Potential& h) {
  double current = 0.0;
  for (const auto& inc : net.neighbors(net.root()))
    current += net.edge(inc.edge).conductance * (h[net.root()] - h[inc.neighbor]);
  return current;
}

// Unit current flow from root to sink. Solves for the voltage with a unit
// current source at the root and the sink grounded, so strength 1 holds
// without rescaling.
inline Flow unit_current_flow(std::shared_ptr<const Network> net,
                              double tol = kDefaultSolverTolerance) {
  const VertexId sink = detail::require_sink(*net);
  std::vector<std::optional<double>> fixed(net->vertex_count());
  fixed[sink] = 0.0;
  std::vector<double> source(net->vertex_count(), 0.0);
  source[net->root()] = 1.0;
  const Potential phi = detail::solve_grounded(*net, fixed, source, tol);
  std::vector<double> values(net->edge_count());
  const auto edges = net->edges();
  for (EdgeId e = 0; e < edges.size(); ++e)
    values[e] = edges[e].conductance * (phi[edges[e].u] - phi[edges[e].v]);
  return Flow(std::move(net), std::move(values), 1.0);
}

struct HittingFlow {
  Flow flow;
  // Root divergence before normalization (the escape current of h).
  double escape_mass = 0.0;
};

// F(x,y) = h(x) - h(y) with h from harmonic_solve, summed over the parallel
// strands a merged edge stands for, then divided by the root divergence.
inline HittingFlow hitting_flow(std::shared_ptr<const Network> net,
                                double tol = kDefaultSolverTolerance) {
  const Potential h = harmonic_solve(*net, tol);
  const double mass = escape_current(*net, h);
  if (!(mass > 0.0)) throw NumericalError("zero escape current: root cannot reach sink");
  std::vector<double> values(net->edge_count());
  const auto edges = net->edges();
  for (EdgeId e = 0; e < edges.size(); ++e)
    values[e] = edges[e].conductance * (h[edges[e].u] - h[edges[e].v]) / mass;
  return {Flow(std::move(net), std::move(values), 1.0), mass};
}

// div F(v) = sum over neighbors u of F(v,u).
inline double divergence(const Flow& flow, VertexId v) {
  const Network& net = flow.network();
  net.check_vertex(v);
  double s = 0.0;
  for (const auto& inc : net.neighbors(v)) s += flow.along(inc.edge, v);
  return s;
}

// Sum over undirected edges of F(e)^2 / c(e).
inline double energy(const Flow& flow) {
  const auto edges = flow.network().edges();
  const auto values = flow.values();
  double s = 0.0;
  for (EdgeId e = 0; e < edges.size(); ++e) s += values[e] * values[e] / edges[e].conductance;
  return s;
}

// Energy summed over ordered adjacent pairs, each undirected edge counted in
// both orientations: exactly 2 * energy(flow).
inline double directed_energy(const Flow& flow) {
  return 2.0 * energy(flow);
}

inline double effective_resistance(std::shared_ptr<const Network> net,
                                   double tol = kDefaultSolverTolerance) {
  return energy(unit_current_flow(std::move(net), tol));
}

struct LoopCheck {
  bool acyclic = true;
  // Topological order of the positive-flow digraph when acyclic.
  std::vector<VertexId> order;
  // One positive-flow cycle v0 -> v1 -> ... -> v0 (first vertex not repeated)
  // when not acyclic.
  std::vector<VertexId> cycle;
};

// Topologically sorts the digraph of oriented edges with F > epsilon.
inline LoopCheck check_no_positive_loops(const Flow& flow, double epsilon = kFlowEpsilon) {
  const Network& net = flow.network();
  const std::size_t n = net.vertex_count();
  std::vector<std::uint32_t> indeg(n, 0);
  for (VertexId v = 0; v < n; ++v)
    for (const auto& inc : net.neighbors(v))
      if (flow.along(inc.edge, v) > epsilon) ++indeg[inc.neighbor];

  LoopCheck result;
  result.order.reserve(n);
  std::vector<VertexId> ready;
  for (VertexId v = n; v-- > 0;)
    if (indeg[v] == 0) ready.push_back(v);
  while (!ready.empty()) {
    const VertexId v = ready.back();
    ready.pop_back();
    result.order.push_back(v);
    const auto adj = net.neighbors(v);
    for (auto it = adj.rbegin(); it != adj.rend(); ++it)
      if (flow.along(it->edge, v) > epsilon && --indeg[it->neighbor] == 0)
        ready.push_back(it->neighbor);
  }
  if (result.order.size() == n) return result;

  // Every leftover vertex still has a leftover positive in-edge; walking
  // in-edges backwards must revisit a vertex.
  result.acyclic = false;
  result.order.clear();
  VertexId start = 0;
  while (indeg[start] == 0) ++start;
  std::vector<std::int64_t> seen_at(n, -1);
  std::vector<VertexId> walk;
  VertexId v = start;
  while (seen_at[v] < 0) {
    seen_at[v] = static_cast<std::int64_t>(walk.size());
    walk.push_back(v);
    for (const auto& inc : net.neighbors(v)) {
      if (indeg[inc.neighbor] > 0 && flow.along(inc.edge, inc.neighbor) > epsilon) {
        v = inc.neighbor;
        break;
      }
    }
  }
  // walk[seen_at[v]..] follows edges backwards; reverse for flow direction
  result.cycle.assign(walk.begin() + seen_at[v], walk.end());
  std::reverse(result.cycle.begin(), result.cycle.end());
  return result;
}

}  // namespace sitnet
