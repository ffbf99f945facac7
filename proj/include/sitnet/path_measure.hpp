#pragma once

#include <cmath>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sitnet/error.hpp"
#include "sitnet/network.hpp"
#include "sitnet/random.hpp"
#include "sitnet/solver.hpp"

namespace sitnet {

// Sum of F(v,w) over neighbors w with F(v,w) > epsilon.
inline double positive_outflow(const Flow& flow, VertexId v, double epsilon = kFlowEpsilon) {
  flow.network().check_vertex(v);
  double s = 0.0;
  for (const auto& inc : flow.network().neighbors(v)) {
    const double x = flow.along(inc.edge, v);
    if (x > epsilon) s += x;
  }
  return s;
}

// Sum of F(w,v) over neighbors w with F(w,v) > epsilon.
inline double positive_inflow(const Flow& flow, VertexId v, double epsilon = kFlowEpsilon) {
  flow.network().check_vertex(v);
  double s = 0.0;
  for (const auto& inc : flow.network().neighbors(v)) {
    const double x = -flow.along(inc.edge, v);
    if (x > epsilon) s += x;
  }
  return s;
}

// Flow passing through v: the outflow everywhere except where a vertex only
// absorbs (the sink), where it is the inflow. Equals both at divergence-free
// vertices.
inline double throughput(const Flow& flow, VertexId v, double epsilon = kFlowEpsilon) {
  return std::max(positive_outflow(flow, v, epsilon), positive_inflow(flow, v, epsilon));
}

struct KernelEntry {
  VertexId to = 0;
  EdgeId edge = 0;
  double probability = 0.0;
};

// Transition kernel Q(u,v) = F(u,v) / f(u) on the positive-flow digraph.
// Rows with f(u) = 0 are absent, making u absorbing.
class PathKernel {
public:
  const Network& network() const noexcept { return *network_; }
  const std::shared_ptr<const Network>& network_ptr() const noexcept { return network_; }
  VertexId root() const noexcept { return network_->root(); }

  std::span<const KernelEntry> row(VertexId u) const {
    network_->check_vertex(u);
    return {entries_.data() + offsets_[u], entries_.data() + offsets_[u + 1]};
  }

  double operator()(VertexId u, VertexId v) const {
    for (const auto& e : row(u))
      if (e.to == v) return e.probability;
    return 0.0;
  }

  // f(u), total positive outflow of the generating flow.
  double outflow(VertexId u) const { return outflow_.at(u); }

  // Topological order of the support digraph.
  std::span<const VertexId> order() const noexcept { return order_; }

  // Vertices other than the sink that receive flow but pass none on; sampled
  // paths are absorbed there.
  std::span<const VertexId> interior_absorbers() const noexcept { return absorbers_; }

  // Replaces the probabilities of row u (same support, same order). Used to
  // build perturbed measures on the same digraph.
  void reweight_row(VertexId u, std::span<const double> probabilities) {
    auto r = std::span<KernelEntry>(entries_.data() + offsets_[u], entries_.data() + offsets_[u + 1]);
    if (probabilities.size() != r.size()) throw InputError("row size mismatch");
    for (std::size_t i = 0; i < r.size(); ++i) r[i].probability = probabilities[i];
  }

private:
  friend PathKernel build_kernel(const Flow& flow, double epsilon);

  std::shared_ptr<const Network> network_;
  std::vector<std::size_t> offsets_;
  std::vector<KernelEntry> entries_;
  std::vector<double> outflow_;
  std::vector<VertexId> order_;
  std::vector<VertexId> absorbers_;
};

// Throws CycleError if the positive-flow digraph has a cycle: the induced
// walk would not be supported on simple paths.
inline PathKernel build_kernel(const Flow& flow, double epsilon = kFlowEpsilon) {
  LoopCheck loops = check_no_positive_loops(flow, epsilon);
  if (!loops.acyclic)
    throw CycleError("flow has a positive loop; refusing to build a path kernel",
                     std::move(loops.cycle));
  const Network& net = flow.network();
  const std::size_t n = net.vertex_count();
  PathKernel k;
  k.network_ = flow.network_ptr();
  k.order_ = std::move(loops.order);
  k.offsets_.assign(n + 1, 0);
  k.outflow_.assign(n, 0.0);
  for (VertexId u = 0; u < n; ++u) {
    double f = 0.0;
    std::size_t begin = k.entries_.size();
    for (const auto& inc : net.neighbors(u)) {
      const double x = flow.along(inc.edge, u);
      if (x > epsilon) {
        f += x;
        k.entries_.push_back({inc.neighbor, inc.edge, x});
      }
    }
    for (std::size_t i = begin; i < k.entries_.size(); ++i) k.entries_[i].probability /= f;
    k.outflow_[u] = f;
    k.offsets_[u + 1] = k.entries_.size();
    if (f == 0.0 && (!net.sink() || u != *net.sink()) && positive_inflow(flow, u, epsilon) > 0.0)
      k.absorbers_.push_back(u);
  }
  return k;
}

// Exact visit probabilities g and edge traversal probabilities of the path
// measure, or empirical frequencies of a sample of paths.
struct VisitProfile {
  std::shared_ptr<const Network> network;
  // g(v): probability that a path visits v.
  std::vector<double> visit;
  // Probability of traversing edge e from e.u to e.v, and from e.v to e.u.
  std::vector<double> forward;
  std::vector<double> backward;

  // Probability of the oriented traversal a -> b.
  double traversal(VertexId a, VertexId b) const {
    auto e = network->find_edge(a, b);
    if (!e) return 0.0;
    return network->edge(*e).u == a ? forward[*e] : backward[*e];
  }
};

// g(root) = 1 and g(v) = sum_u g(u) Q(u,v), evaluated in topological order.
inline VisitProfile visit_probability(const PathKernel& kernel) {
  const Network& net = kernel.network();
  VisitProfile p{kernel.network_ptr(), std::vector<double>(net.vertex_count(), 0.0),
                 std::vector<double>(net.edge_count(), 0.0),
                 std::vector<double>(net.edge_count(), 0.0)};
  p.visit[kernel.root()] = 1.0;
  for (VertexId u : kernel.order()) {
    const double gu = p.visit[u];
    if (gu == 0.0) continue;
    for (const auto& e : kernel.row(u)) {
      const double mass = gu * e.probability;
      p.visit[e.to] += mass;
      (net.edge(e.edge).u == u ? p.forward : p.backward)[e.edge] = mass;
    }
  }
  return p;
}

// g(v) ~ sum_{k=0}^{steps} Q^k(root, v). Exact once steps reaches the
// longest support path; kept as a cross-check of visit_probability.
inline std::vector<double> visit_probability_series(const PathKernel& kernel, std::size_t steps) {
  const std::size_t n = kernel.network().vertex_count();
  std::vector<double> total(n, 0.0), current(n, 0.0), next(n, 0.0);
  current[kernel.root()] = 1.0;
  total[kernel.root()] = 1.0;
  for (std::size_t k = 0; k < steps; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    bool any = false;
    for (VertexId u = 0; u < n; ++u) {
      if (current[u] == 0.0) continue;
      for (const auto& e : kernel.row(u)) {
        next[e.to] += current[u] * e.probability;
        any = true;
      }
    }
    if (!any) break;
    for (VertexId v = 0; v < n; ++v) total[v] += next[v];
    current.swap(next);
  }
  return total;
}

// Root-started vertex sequence, absorbed at the sink or at a vertex without
// outgoing kernel mass.
struct SimplePath {
  std::vector<VertexId> vertices;

  std::size_t size() const noexcept { return vertices.size(); }
  friend bool operator==(const SimplePath&, const SimplePath&) = default;
};

inline SimplePath sample_path(const PathKernel& kernel, CounterRng& rng) {
  const auto sink = kernel.network().sink();
  SimplePath path;
  VertexId u = kernel.root();
  path.vertices.push_back(u);
  while (!(sink && u == *sink)) {
    const auto row = kernel.row(u);
    if (row.empty()) break;
    double x = rng.uniform();
    VertexId next = row.back().to;
    for (const auto& e : row) {
      if (x < e.probability) {
        next = e.to;
        break;
      }
      x -= e.probability;
    }
    u = next;
    path.vertices.push_back(u);
  }
  return path;
}

inline SimplePath sample_path(const PathKernel& kernel, std::uint64_t seed) {
  CounterRng rng(seed);
  return sample_path(kernel, rng);
}

// The i-th path of the reproducible sample (seed, i): chunk i / kChunkSize,
// stream of that chunk.
inline std::vector<SimplePath> sample_paths(const PathKernel& kernel, std::size_t count,
                                            std::uint64_t seed,
                                            unsigned workers = default_worker_count()) {
  using Batch = std::vector<SimplePath>;
  return parallel_chunks<Batch>(
      count, workers,
      [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        CounterRng rng(seed, chunk);
        Batch batch;
        batch.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) batch.push_back(sample_path(kernel, rng));
        return batch;
      },
      [](Batch& acc, Batch& part) {
        acc.insert(acc.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
      });
}

// True when no vertex repeats and consecutive vertices are adjacent.
inline bool is_simple_path(const Network& net, const SimplePath& path) {
  std::vector<char> seen(net.vertex_count(), 0);
  for (std::size_t i = 0; i < path.vertices.size(); ++i) {
    const VertexId v = path.vertices[i];
    if (!net.contains(v) || seen[v]) return false;
    seen[v] = 1;
    if (i > 0 && !net.find_edge(path.vertices[i - 1], v)) return false;
  }
  return true;
}

struct Estimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

namespace detail {

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  void merge(const Moments& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
  }
  // Sample mean and standard error of the mean.
  Estimate estimate() const {
    Estimate e;
    e.samples = count;
    if (count == 0) return e;
    e.mean = sum / static_cast<double>(count);
    if (count > 1) {
      const double var =
          std::max(0.0, (sum_sq - sum * e.mean) / static_cast<double>(count - 1));
      e.standard_error = std::sqrt(var / static_cast<double>(count));
    }
    return e;
  }
};

}  // namespace detail

// Fraction of sampled paths that contain v, with binomial standard error.
inline Estimate empirical_visit_frequency(const PathKernel& kernel, VertexId v,
                                          std::size_t samples, std::uint64_t seed,
                                          unsigned workers = default_worker_count()) {
  kernel.network().check_vertex(v);
  if (samples == 0) throw InputError("need at least one sample");
  const std::size_t hits = parallel_chunks<std::size_t>(
      samples, workers,
      [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        CounterRng rng(seed, chunk);
        std::size_t h = 0;
        for (std::size_t i = begin; i < end; ++i) {
          const SimplePath p = sample_path(kernel, rng);
          h += std::find(p.vertices.begin(), p.vertices.end(), v) != p.vertices.end();
        }
        return h;
      },
      [](std::size_t& acc, std::size_t part) { acc += part; });
  Estimate e;
  e.samples = samples;
  e.mean = static_cast<double>(hits) / static_cast<double>(samples);
  e.standard_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(samples));
  return e;
}

// Empirical visit and traversal frequencies of `samples` paths.
inline VisitProfile empirical_profile(const PathKernel& kernel, std::size_t samples,
                                      std::uint64_t seed,
                                      unsigned workers = default_worker_count()) {
  if (samples == 0) throw InputError("need at least one sample");
  const Network& net = kernel.network();
  struct Counts {
    std::vector<std::uint64_t> visit, forward, backward;
  };
  Counts counts = parallel_chunks<Counts>(
      samples, workers,
      [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        CounterRng rng(seed, chunk);
        Counts c{std::vector<std::uint64_t>(net.vertex_count()),
                 std::vector<std::uint64_t>(net.edge_count()),
                 std::vector<std::uint64_t>(net.edge_count())};
        for (std::size_t i = begin; i < end; ++i) {
          const SimplePath p = sample_path(kernel, rng);
          for (std::size_t s = 0; s < p.vertices.size(); ++s) {
            ++c.visit[p.vertices[s]];
            if (s + 1 < p.vertices.size()) {
              const EdgeId e = *net.find_edge(p.vertices[s], p.vertices[s + 1]);
              ++(net.edge(e).u == p.vertices[s] ? c.forward : c.backward)[e];
            }
          }
        }
        return c;
      },
      [&](Counts& acc, Counts& part) {
        if (acc.visit.empty()) {
          acc = std::move(part);
          return;
        }
        for (std::size_t i = 0; i < acc.visit.size(); ++i) acc.visit[i] += part.visit[i];
        for (std::size_t i = 0; i < acc.forward.size(); ++i) {
          acc.forward[i] += part.forward[i];
          acc.backward[i] += part.backward[i];
        }
      });
  const double scale = 1.0 / static_cast<double>(samples);
  VisitProfile p{kernel.network_ptr(), {}, {}, {}};
  for (auto x : counts.visit) p.visit.push_back(static_cast<double>(x) * scale);
  for (auto x : counts.forward) p.forward.push_back(static_cast<double>(x) * scale);
  for (auto x : counts.backward) p.backward.push_back(static_cast<double>(x) * scale);
  return p;
}

// One path per line, space-separated ids, after a '#' header line.
inline void write_path_dump(std::ostream& out, std::span<const SimplePath> paths,
                            const std::string& graph_hash, std::uint64_t seed) {
  out << "# sitnet paths graph_hash=" << graph_hash << " seed=" << seed
      << " count=" << paths.size() << "\n";
  for (const auto& p : paths) {
    for (std::size_t i = 0; i < p.vertices.size(); ++i) out << (i ? " " : "") << p.vertices[i];
    out << "\n";
  }
}

}  // namespace sitnet
