#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sitnet/error.hpp"
#include "sitnet/types.hpp"

namespace sitnet {

// Undirected edge with u < v.
struct Edge {
  VertexId u = 0;
  VertexId v = 0;
  double conductance = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// One entry of a vertex's adjacency list.
struct Incidence {
  VertexId neighbor = 0;
  EdgeId edge = 0;
};

// Finite weighted rooted graph, optionally with a sink standing in for the
// wired boundary. Immutable once built; construct through NetworkBuilder.
//
// Conductances are read as edge multiplicities: a merged edge of conductance
// c stands for c parallel unit strands. Generated networks only ever produce
// integer conductances.
class Network {
public:
  std::size_t vertex_count() const noexcept { return offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  VertexId root() const noexcept { return root_; }
  std::optional<VertexId> sink() const noexcept { return sink_; }
  bool has_sink() const noexcept { return sink_.has_value(); }

  // Sorted by (u, v).
  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }

  // Incident edges of v, sorted by neighbor id.
  std::span<const Incidence> neighbors(VertexId v) const {
    check_vertex(v);
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }

  std::optional<EdgeId> find_edge(VertexId a, VertexId b) const {
    if (a >= vertex_count() || b >= vertex_count()) return std::nullopt;
    auto adj = neighbors(a);
    auto it = std::lower_bound(adj.begin(), adj.end(), b,
                               [](const Incidence& i, VertexId x) { return i.neighbor < x; });
    if (it == adj.end() || it->neighbor != b) return std::nullopt;
    return it->edge;
  }

  // Number of distinct neighbors.
  std::size_t degree(VertexId v) const { return neighbors(v).size(); }

  // Sum of incident conductances, i.e. the multigraph degree.
  double weighted_degree(VertexId v) const {
    double d = 0.0;
    for (const auto& inc : neighbors(v)) d += edges_[inc.edge].conductance;
    return d;
  }

  double max_weighted_degree() const {
    double d = 0.0;
    for (VertexId v = 0; v < vertex_count(); ++v) d = std::max(d, weighted_degree(v));
    return d;
  }

  bool unit_conductances() const noexcept {
    return std::all_of(edges_.begin(), edges_.end(),
                       [](const Edge& e) { return e.conductance == 1.0; });
  }

  bool contains(VertexId v) const noexcept { return v < vertex_count(); }

  void check_vertex(VertexId v) const {
    if (v >= vertex_count())
      throw InputError("unknown vertex " + std::to_string(v));
  }

  friend bool operator==(const Network& a, const Network& b) {
    return a.root_ == b.root_ && a.sink_ == b.sink_ &&
           a.vertex_count() == b.vertex_count() && a.edges_ == b.edges_;
  }

private:
  friend class NetworkBuilder;

  Network(std::size_t n, std::vector<Edge> edges, VertexId root, std::optional<VertexId> sink)
      : edges_(std::move(edges)), root_(root), sink_(sink) {
    std::vector<std::uint32_t> count(n + 1, 0);
    for (const auto& e : edges_) {
      ++count[e.u];
      ++count[e.v];
    }
    offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + count[v];
    adjacency_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    // edges_ is sorted by (u, v): lower neighbors first, then higher ones,
    // leaves every adjacency row sorted by neighbor id
    for (EdgeId id = 0; id < edges_.size(); ++id) {
      const auto& e = edges_[id];
      adjacency_[fill[e.v]++] = {e.u, id};
    }
    for (EdgeId id = 0; id < edges_.size(); ++id) {
      const auto& e = edges_[id];
      adjacency_[fill[e.u]++] = {e.v, id};
    }
  }

  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Incidence> adjacency_;
  VertexId root_ = 0;
  std::optional<VertexId> sink_;
};

// Accumulates edges, merging parallel ones by the parallel law, then
// validates every Network invariant in build().
class NetworkBuilder {
public:
  explicit NetworkBuilder(std::size_t vertex_count) : n_(vertex_count) {}

  void reserve(std::size_t edges) { raw_.reserve(edges); }

  NetworkBuilder& add_edge(VertexId a, VertexId b, double conductance = 1.0) {
    if (a >= n_ || b >= n_)
      throw InputError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                       ") references a vertex outside 0.." + std::to_string(n_ - 1));
    if (a == b) throw InputError("self-loop at vertex " + std::to_string(a));
    if (!std::isfinite(conductance))
      throw InputError("non-finite conductance on edge (" + std::to_string(a) + "," +
                       std::to_string(b) + ")");
    if (conductance <= 0.0)
      throw InputError("nonpositive conductance on edge (" + std::to_string(a) + "," +
                       std::to_string(b) + ")");
    auto key = std::minmax(a, b);
    raw_.push_back({key.first, key.second, conductance});
    return *this;
  }

  NetworkBuilder& root(VertexId r) {
    root_ = r;
    return *this;
  }
  NetworkBuilder& sink(std::optional<VertexId> s) {
    sink_ = s;
    return *this;
  }

  // Vertex pairs that received more than one add_edge call, as of the last
  // build().
  const std::vector<std::pair<VertexId, VertexId>>& merged_pairs() const noexcept {
    return merged_pairs_;
  }

  Network build() {
    if (n_ == 0) throw InputError("network has no vertices");
    if (root_ >= n_) throw InputError("root " + std::to_string(root_) + " out of range");
    if (sink_) {
      if (*sink_ >= n_) throw InputError("sink " + std::to_string(*sink_) + " out of range");
      if (*sink_ == root_) throw InputError("sink equals root");
    }
    std::vector<Edge> edges = raw_;
    std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return std::tie(a.u, a.v) < std::tie(b.u, b.v);
    });
    merged_pairs_.clear();
    std::size_t out = 0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (out > 0 && edges[out - 1].u == edges[i].u && edges[out - 1].v == edges[i].v) {
        edges[out - 1].conductance += edges[i].conductance;
        if (merged_pairs_.empty() || merged_pairs_.back() != std::pair{edges[i].u, edges[i].v})
          merged_pairs_.emplace_back(edges[i].u, edges[i].v);
      } else {
        edges[out++] = edges[i];
      }
    }
    edges.resize(out);
    Network net(n_, std::move(edges), root_, sink_);
    check_connected(net);
    return net;
  }

private:
  static void check_connected(const Network& net) {
    std::vector<char> seen(net.vertex_count(), 0);
    std::queue<VertexId> q;
    q.push(net.root());
    seen[net.root()] = 1;
    std::size_t reached = 1;
    while (!q.empty()) {
      VertexId v = q.front();
      q.pop();
      for (const auto& inc : net.neighbors(v)) {
        if (!seen[inc.neighbor]) {
          seen[inc.neighbor] = 1;
          ++reached;
          q.push(inc.neighbor);
        }
      }
    }
    if (reached != net.vertex_count()) {
      auto it = std::find(seen.begin(), seen.end(), 0);
      throw InputError("network is disconnected: vertex " +
                       std::to_string(it - seen.begin()) + " unreachable from root");
    }
  }

  std::size_t n_;
  std::vector<Edge> raw_;
  std::vector<std::pair<VertexId, VertexId>> merged_pairs_;
  VertexId root_ = 0;
  std::optional<VertexId> sink_;
};

}  // namespace sitnet
