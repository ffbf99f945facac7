#pragma once

// Dense Gaussian elimination for small Dirichlet problems; test-only
// cross-check of the conjugate gradient solver.

#include <cmath>
#include <utility>
#include <vector>

#include "sitnet/network.hpp"

namespace oracle {

// Solves A x = b in place (partial pivoting). A is row-major n x n.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

// h(root) = 1, h(sink) = 0, weighted-harmonic elsewhere.
inline std::vector<double> dense_potential(const sitnet::Network& net) {
  const std::size_t n = net.vertex_count();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n, 0.0);
  for (sitnet::VertexId v = 0; v < n; ++v) {
    if (v == net.root() || v == *net.sink()) {
      a[v][v] = 1.0;
      b[v] = v == net.root() ? 1.0 : 0.0;
      continue;
    }
    for (const auto& inc : net.neighbors(v)) {
      const double c = net.edge(inc.edge).conductance;
      a[v][v] += c;
      a[v][inc.neighbor] -= c;
    }
  }
  return gauss_solve(std::move(a), std::move(b));
}

}  // namespace oracle
