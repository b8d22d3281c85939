#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "bethe_zeta/error.hpp"
#include "bethe_zeta/graph.hpp"
#include "bethe_zeta/linalg.hpp"

namespace bethe_zeta {

/// Graph Laplacian D - A; self-loops do not contribute, parallel edges add up.
inline Matrix laplacian(const Graph& g) {
  const int n = g.num_vertices();
  Matrix l = Matrix::Zero(n, n);
  for (const auto& e : g.edges()) {
    if (e.u == e.v) continue;
    l(e.u, e.u) += 1.0;
    l(e.v, e.v) += 1.0;
    l(e.u, e.v) -= 1.0;
    l(e.v, e.u) -= 1.0;
  }
  return l;
}

/// Number of spanning trees via the Matrix-Tree theorem, from the principal
/// cofactor obtained by deleting the last row and column.
inline std::int64_t spanning_tree_count(const Graph& g, double tolerance = 1e-6) {
  const int n = g.num_vertices();
  if (n == 1) return 1;
  const Matrix minor = laplacian(g).topLeftCorner(n - 1, n - 1);
  const double det = minor.partialPivLu().determinant();
  const double rounded = std::round(det);
  if (!std::isfinite(det) || std::abs(det - rounded) > tolerance * std::max(1.0, std::abs(det)) || rounded < 1.0) {
    fail(ErrorKind::NumericalIntegrityError, "spanning_tree_count",
         "cofactor determinant " + fmt(det) + " is not a positive integer");
  }
  return static_cast<std::int64_t>(rounded);
}

}  // namespace bethe_zeta
