#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <unordered_map>
#include <vector>

#include "sitnet/error.hpp"
#include "sitnet/network.hpp"

namespace sitnet {

// Upper bound on generated vertex counts. Large enough for the biggest
// diamond (N = 24).
inline constexpr std::size_t kMaxGeneratedVertices = std::size_t{1} << 26;

// ---------------------------------------------------------------------------
// Path graph 0 - 1 - ... - L. Vertex i is i; root 0, sink L.

inline Network make_path_graph(std::uint32_t length) {
  if (length == 0) throw InputError("path length must be at least 1");
  if (length >= kMaxGeneratedVertices) throw InputError("path length too large");
  NetworkBuilder b(length + 1);
  b.reserve(length);
  for (VertexId i = 0; i < length; ++i) b.add_edge(i, i + 1);
  return b.root(0).sink(length).build();
}

// ---------------------------------------------------------------------------
// Diamond graph: the N-skeleton 0..N where skeleton edge (n-1, n) is replaced
// by 2^n parallel length-2 branches through their own middle vertex.
//
// Ids interleave skeleton and middle vertices so that the graph for N is a
// prefix of the graph for N + 1:
//   skeleton n       -> n + 2^(n+1) - 2
//   middle j of n    -> skeleton(n-1) + 1 + j,  0 <= j < 2^n

inline constexpr int kMaxDiamondLevels = 24;

inline VertexId diamond_skeleton_id(int n) {
  return static_cast<VertexId>(n + (std::uint64_t{1} << (n + 1)) - 2);
}

inline VertexId diamond_middle_id(int n, std::uint32_t branch) {
  return diamond_skeleton_id(n - 1) + 1 + branch;
}

inline std::size_t diamond_vertex_count(int levels) {
  return (std::size_t{1} << (levels + 1)) + levels - 1;
}

inline std::size_t diamond_edge_count(int levels) {
  return (std::size_t{1} << (levels + 2)) - 4;
}

inline Network make_diamond_graph(int levels) {
  if (levels < 1 || levels > kMaxDiamondLevels)
    throw InputError("diamond level count must be in 1.." + std::to_string(kMaxDiamondLevels) +
                     ", got " + std::to_string(levels));
  NetworkBuilder b(diamond_vertex_count(levels));
  b.reserve(diamond_edge_count(levels));
  for (int n = 1; n <= levels; ++n) {
    const VertexId left = diamond_skeleton_id(n - 1);
    const VertexId right = diamond_skeleton_id(n);
    const std::uint32_t branches = std::uint32_t{1} << n;
    for (std::uint32_t j = 0; j < branches; ++j) {
      const VertexId mid = diamond_middle_id(n, j);
      b.add_edge(left, mid);
      b.add_edge(mid, right);
    }
  }
  return b.root(diamond_skeleton_id(0)).sink(diamond_skeleton_id(levels)).build();
}

// ---------------------------------------------------------------------------
// Complete binary tree with its depth-D level wired into one sink.
//
// Heap ids: root 0, children of i are 2i+1 and 2i+2, vertices of depth < D
// occupy 0 .. 2^D - 2 and the sink is 2^D - 1. The two leaves below a depth
// D-1 vertex collapse into a single sink edge of conductance 2.

inline constexpr int kMaxTreeDepth = 24;

inline VertexId tree_sink_id(int depth) {
  return static_cast<VertexId>((std::uint64_t{1} << depth) - 1);
}

inline Network make_binary_tree(int depth) {
  if (depth < 1 || depth > kMaxTreeDepth)
    throw InputError("tree depth must be in 1.." + std::to_string(kMaxTreeDepth) + ", got " +
                     std::to_string(depth));
  const VertexId sink = tree_sink_id(depth);
  NetworkBuilder b(std::size_t{sink} + 1);
  b.reserve(2 * std::size_t{sink});
  const VertexId first_last_level = tree_sink_id(depth - 1);
  for (VertexId i = 0; i < sink; ++i) {
    if (i < first_last_level) {
      b.add_edge(i, 2 * i + 1);
      b.add_edge(i, 2 * i + 2);
    } else {
      b.add_edge(i, sink);
      b.add_edge(i, sink);
    }
  }
  return b.root(0).sink(sink).build();
}

// ---------------------------------------------------------------------------
// Lattice ball {x in Z^d : |x|_1 <= r} with the sphere |x|_1 = r wired into
// one sink.
//
// Interior points are numbered by increasing |x|_1, lexicographically within
// each shell, so the ball of radius r is a prefix of the ball of radius r+1.
// The sink takes the next id.

inline constexpr int kMaxLatticeDim = 4;

using LatticePoint = std::array<int, kMaxLatticeDim>;

// Number of points of Z^d with |x|_1 <= m.
inline std::uint64_t lattice_ball_size(int dim, std::uint64_t m) {
  // sum_k 2^k C(d,k) C(m,k)
  long double total = 0.0L;
  long double binom_d = 1.0L, binom_m = 1.0L, pow2 = 1.0L;
  for (int k = 0; k <= dim; ++k) {
    if (k > 0) {
      binom_d = binom_d * (dim - k + 1) / k;
      binom_m = m >= static_cast<std::uint64_t>(k) ? binom_m * (m - k + 1) / k : 0.0L;
      pow2 *= 2.0L;
    }
    total += pow2 * binom_d * binom_m;
  }
  if (total > 1e18L) return UINT64_MAX;
  return static_cast<std::uint64_t>(total + 0.5L);
}

inline int l1_norm(const LatticePoint& x, int dim) {
  int s = 0;
  for (int k = 0; k < dim; ++k) s += std::abs(x[k]);
  return s;
}

// Interior points in id order.
inline std::vector<LatticePoint> lattice_ball_points(int dim, int radius) {
  std::vector<LatticePoint> points;
  if (radius < 1) return points;
  const int m = radius - 1;
  points.reserve(lattice_ball_size(dim, static_cast<std::uint64_t>(m)));
  LatticePoint x{};
  // lexicographic enumeration of |x|_1 <= m
  auto rec = [&](auto&& self, int k, int budget) -> void {
    if (k == dim) {
      points.push_back(x);
      return;
    }
    for (int c = -budget; c <= budget; ++c) {
      x[k] = c;
      self(self, k + 1, budget - std::abs(c));
    }
    x[k] = 0;
  };
  rec(rec, 0, m);
  std::stable_sort(points.begin(), points.end(), [dim](const LatticePoint& a, const LatticePoint& b) {
    return l1_norm(a, dim) < l1_norm(b, dim);
  });
  return points;
}

inline Network make_lattice_ball(int dim, int radius) {
  if (dim < 1 || dim > kMaxLatticeDim)
    throw InputError("lattice dimension must be in 1.." + std::to_string(kMaxLatticeDim));
  if (radius < 1) throw InputError("lattice radius must be at least 1");
  const std::uint64_t interior = lattice_ball_size(dim, static_cast<std::uint64_t>(radius - 1));
  if (interior >= kMaxGeneratedVertices)
    throw InputError("lattice ball of dimension " + std::to_string(dim) + " and radius " +
                     std::to_string(radius) + " exceeds the vertex budget");

  const auto points = lattice_ball_points(dim, radius);
  const auto sink = static_cast<VertexId>(points.size());
  const std::uint64_t base = 2 * static_cast<std::uint64_t>(radius) + 1;
  auto pack = [&](const LatticePoint& p) {
    std::uint64_t key = 0;
    for (int k = 0; k < dim; ++k) key = key * base + static_cast<std::uint64_t>(p[k] + radius);
    return key;
  };
  std::unordered_map<std::uint64_t, VertexId> index;
  index.reserve(points.size());
  for (VertexId id = 0; id < points.size(); ++id) index.emplace(pack(points[id]), id);

  NetworkBuilder b(points.size() + 1);
  b.reserve(points.size() * dim * 2);
  for (VertexId id = 0; id < points.size(); ++id) {
    for (int k = 0; k < dim; ++k) {
      for (int step : {-1, 1}) {
        LatticePoint y = points[id];
        y[k] += step;
        if (l1_norm(y, dim) >= radius) {
          b.add_edge(id, sink);
        } else {
          const VertexId other = index.at(pack(y));
          if (id < other) b.add_edge(id, other);
        }
      }
    }
  }
  return b.root(0).sink(sink).build();
}

// ---------------------------------------------------------------------------

enum class FamilyKind { Path, Lattice, BinaryTree, Diamond };

struct GraphFamily {
  FamilyKind kind = FamilyKind::Path;
  int dim = 0;  // lattice only

  static GraphFamily path() { return {FamilyKind::Path, 0}; }
  static GraphFamily lattice(int d) { return {FamilyKind::Lattice, d}; }
  static GraphFamily binary_tree() { return {FamilyKind::BinaryTree, 0}; }
  static GraphFamily diamond() { return {FamilyKind::Diamond, 0}; }

  // "path", "lattice3", "tree", "diamond"
  std::string name() const {
    switch (kind) {
      case FamilyKind::Path: return "path";
      case FamilyKind::Lattice: return "lattice" + std::to_string(dim);
      case FamilyKind::BinaryTree: return "tree";
      case FamilyKind::Diamond: return "diamond";
    }
    return "?";
  }

  void validate() const {
    if (kind == FamilyKind::Lattice && (dim < 1 || dim > kMaxLatticeDim))
      throw InputError("lattice dimension must be in 1.." + std::to_string(kMaxLatticeDim));
  }

  // Accepts the names produced by name(), plus "lattice" with a separate dim.
  static GraphFamily parse(const std::string& text, int lattice_dim = 0) {
    if (text == "path") return path();
    if (text == "tree" || text == "binary-tree") return binary_tree();
    if (text == "diamond") return diamond();
    if (text.rfind("lattice", 0) == 0) {
      int d = lattice_dim;
      if (text.size() > 7) {
        try {
          d = std::stoi(text.substr(7));
        } catch (const std::exception&) {
          throw InputError("bad lattice family '" + text + "'");
        }
      }
      GraphFamily f = lattice(d);
      f.validate();
      return f;
    }
    throw InputError("unknown graph family '" + text + "'");
  }

  friend bool operator==(const GraphFamily&, const GraphFamily&) = default;
};

// Finite wired exhaustion of a family at truncation parameter r.
inline Network exhaustion(const GraphFamily& family, int r) {
  family.validate();
  if (r < 1) throw InputError("truncation parameter must be at least 1");
  switch (family.kind) {
    case FamilyKind::Path: return make_path_graph(static_cast<std::uint32_t>(r));
    case FamilyKind::Lattice: return make_lattice_ball(family.dim, r);
    case FamilyKind::BinaryTree: return make_binary_tree(r);
    case FamilyKind::Diamond: return make_diamond_graph(r);
  }
  throw InputError("unknown graph family");
}

}  // namespace sitnet
