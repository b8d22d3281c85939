#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bethe_zeta/error.hpp"
#include "bethe_zeta/graph.hpp"
#include "bethe_zeta/linalg.hpp"
#include "bethe_zeta/model.hpp"

namespace bethe_zeta {

/// Pseudomarginals in mean/correlation coordinates:
///   b_i(x)     = (1 + m_i x) / 2
///   b_ij(x, y) = (1 + m_i x + m_j y + chi_ij x y) / 4
/// with chi indexed by undirected edge and (i, j) = (edge.u, edge.v).
struct Pseudomarginals {
  std::vector<double> m;
  std::vector<double> chi;

  static Pseudomarginals zero(const Graph& g) {
    return {std::vector<double>(static_cast<std::size_t>(g.num_vertices()), 0.0),
            std::vector<double>(static_cast<std::size_t>(g.num_edges()), 0.0)};
  }
};

/// Packed variable vector [m_0 .. m_{N-1}, chi_0 .. chi_{M-1}].
inline Vector pack(const Pseudomarginals& q) {
  Vector x(static_cast<Eigen::Index>(q.m.size() + q.chi.size()));
  Eigen::Index k = 0;
  for (double v : q.m) x(k++) = v;
  for (double v : q.chi) x(k++) = v;
  return x;
}

inline Pseudomarginals unpack(const Graph& g, const Vector& x) {
  Pseudomarginals q;
  const int n = g.num_vertices();
  q.m.assign(x.data(), x.data() + n);
  q.chi.assign(x.data() + n, x.data() + n + g.num_edges());
  return q;
}

/// Interior threshold below which derivative evaluations refuse to run.
inline constexpr double kDomainFloor = 1e-9;

/// Spin configurations in the order (++, +-, -+, --).
inline constexpr std::array<std::array<int, 2>, 4> kPairSpins{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

/// 1 + m_i x + m_j y + chi x y for the four spin pairs of edge k (equals 4 b_ij).
inline std::array<double, 4> pair_forms(const Graph& g, const Pseudomarginals& q, int k) {
  const auto& e = g.edge(k);
  const double mi = q.m[static_cast<std::size_t>(e.u)];
  const double mj = q.m[static_cast<std::size_t>(e.v)];
  const double c = q.chi[static_cast<std::size_t>(k)];
  std::array<double, 4> out{};
  for (std::size_t s = 0; s < 4; ++s) {
    const int x = kPairSpins[s][0];
    const int y = kPairSpins[s][1];
    out[s] = 1.0 + mi * x + mj * y + c * x * y;
  }
  return out;
}

struct DomainCheck {
  bool inside = false;
  /// Smallest of the linear forms defining L(G).
  double margin = 0.0;
};

inline DomainCheck in_domain(const Graph& g, const Pseudomarginals& q) {
  if (static_cast<int>(q.m.size()) != g.num_vertices() || static_cast<int>(q.chi.size()) != g.num_edges())
    fail(ErrorKind::InvalidArgument, "in_domain", "pseudomarginal sizes do not match the graph");
  double margin = std::numeric_limits<double>::infinity();
  for (double mi : q.m) margin = std::min({margin, 1.0 + mi, 1.0 - mi});
  for (int k = 0; k < g.num_edges(); ++k) {
    for (double f : pair_forms(g, q, k)) margin = std::min(margin, f);
  }
  if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
  return {margin > 0.0, margin};
}

inline void require_interior(const Graph& g, const Pseudomarginals& q, const char* op) {
  const auto d = in_domain(g, q);
  if (d.margin < kDomainFloor)
    fail(ErrorKind::OutOfDomain, op, "margin " + fmt(d.margin) + " below interior floor");
}

namespace detail {
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }
}  // namespace detail

/// Entropy part of the Bethe free energy (independent of J and h).
inline double bethe_entropy_term(const Graph& g, const Pseudomarginals& q) {
  double f = 0.0;
  for (int k = 0; k < g.num_edges(); ++k) {
    for (double form : pair_forms(g, q, k)) f += detail::xlogx(form / 4.0);
  }
  for (int i = 0; i < g.num_vertices(); ++i) {
    const double mi = q.m[static_cast<std::size_t>(i)];
    const double w = 1.0 - g.degree(i);
    f += w * (detail::xlogx((1.0 + mi) / 2.0) + detail::xlogx((1.0 - mi) / 2.0));
  }
  return f;
}

inline double free_energy(const BinaryPairwiseModel& model, const Pseudomarginals& q) {
  const Graph& g = model.graph;
  require_interior(g, q, "free_energy");
  double energy = 0.0;
  for (int k = 0; k < g.num_edges(); ++k) energy -= model.coupling[static_cast<std::size_t>(k)] * q.chi[static_cast<std::size_t>(k)];
  for (int i = 0; i < g.num_vertices(); ++i) energy -= model.field[static_cast<std::size_t>(i)] * q.m[static_cast<std::size_t>(i)];
  return energy + bethe_entropy_term(g, q);
}

/// Analytic gradient, packed as [dF/dm, dF/dchi].
inline Vector gradient(const BinaryPairwiseModel& model, const Pseudomarginals& q) {
  const Graph& g = model.graph;
  require_interior(g, q, "gradient");
  const int n = g.num_vertices();
  Vector grad = Vector::Zero(n + g.num_edges());
  for (int i = 0; i < n; ++i) {
    const double mi = q.m[static_cast<std::size_t>(i)];
    grad(i) = -model.field[static_cast<std::size_t>(i)] +
              (1.0 - g.degree(i)) * 0.5 * (std::log((1.0 + mi) / 2.0) - std::log((1.0 - mi) / 2.0));
  }
  for (int k = 0; k < g.num_edges(); ++k) {
    const auto& e = g.edge(k);
    const auto forms = pair_forms(g, q, k);
    double dm_i = 0.0, dm_j = 0.0, dchi = 0.0;
    for (std::size_t s = 0; s < 4; ++s) {
      const double lb = std::log(forms[s] / 4.0);
      const int x = kPairSpins[s][0];
      const int y = kPairSpins[s][1];
      dm_i += x * lb;
      dm_j += y * lb;
      dchi += x * y * lb;
    }
    grad(e.u) += 0.25 * dm_i;
    grad(e.v) += 0.25 * dm_j;
    grad(n + k) = -model.coupling[static_cast<std::size_t>(k)] + 0.25 * dchi;
  }
  return grad;
}

/// Per-edge second-derivative quantities:
///   r = 1/4 sum 1/form, s_ij = 1/4 sum y/form, s_ji = 1/4 sum x/form,
///   t = 1/4 sum x y/form.
struct EdgeCurvature {
  double r = 0.0;
  double s_ij = 0.0;
  double s_ji = 0.0;
  double t = 0.0;
};

inline EdgeCurvature edge_curvature(const Graph& g, const Pseudomarginals& q, int k) {
  const auto forms = pair_forms(g, q, k);
  EdgeCurvature c;
  for (std::size_t s = 0; s < 4; ++s) {
    const double inv = 0.25 / forms[s];
    const int x = kPairSpins[s][0];
    const int y = kPairSpins[s][1];
    c.r += inv;
    c.s_ij += y * inv;
    c.s_ji += x * inv;
    c.t += x * y * inv;
  }
  return c;
}

/// Hessian of the Bethe free energy, ordered [vertices | edges].
struct BetheHessian {
  Matrix full;
  int num_vertices = 0;

  auto vv() const { return full.topLeftCorner(num_vertices, num_vertices); }
  auto ve() const { return full.topRightCorner(num_vertices, full.cols() - num_vertices); }
  auto ee() const { return full.bottomRightCorner(full.rows() - num_vertices, full.cols() - num_vertices); }
};

/// Analytic Hessian; depends on the point only, never on J or h.
inline BetheHessian hessian(const Graph& g, const Pseudomarginals& q) {
  require_interior(g, q, "hessian");
  const int n = g.num_vertices();
  const int dim = n + g.num_edges();
  BetheHessian h{Matrix::Zero(dim, dim), n};
  Matrix& a = h.full;
  for (int i = 0; i < n; ++i) {
    const double mi = q.m[static_cast<std::size_t>(i)];
    a(i, i) = (1.0 - g.degree(i)) / (1.0 - mi * mi);
  }
  for (int k = 0; k < g.num_edges(); ++k) {
    const auto& e = g.edge(k);
    const auto c = edge_curvature(g, q, k);
    a(e.u, e.u) += c.r;
    a(e.v, e.v) += c.r;
    a(e.u, e.v) += c.t;
    a(e.v, e.u) += c.t;
    a(e.u, n + k) = a(n + k, e.u) = c.s_ij;
    a(e.v, n + k) = a(n + k, e.v) = c.s_ji;
    a(n + k, n + k) = c.r;
  }
  return h;
}

/// Schur complement of the Hessian onto the vertex block, in closed form.
inline Matrix y_matrix(const Graph& g, const Pseudomarginals& q) {
  require_interior(g, q, "y_matrix");
  const int n = g.num_vertices();
  Matrix y = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double mi = q.m[static_cast<std::size_t>(i)];
    y(i, i) = 1.0 / (1.0 - mi * mi);
  }
  for (int k = 0; k < g.num_edges(); ++k) {
    const auto& e = g.edge(k);
    const double mi = q.m[static_cast<std::size_t>(e.u)];
    const double mj = q.m[static_cast<std::size_t>(e.v)];
    const double c = q.chi[static_cast<std::size_t>(k)];
    const double cov = c - mi * mj;
    const double denom = 1.0 - mi * mi - mj * mj + 2.0 * mi * mj * c - c * c;
    y(e.u, e.u) += cov * cov / ((1.0 - mi * mi) * denom);
    y(e.v, e.v) += cov * cov / ((1.0 - mj * mj) * denom);
    y(e.u, e.v) -= cov / denom;
    y(e.v, e.u) -= cov / denom;
  }
  return y;
}

/// Node beliefs b_i(+), b_i(-).
inline std::array<double, 2> node_belief(const Pseudomarginals& q, int i) {
  const double mi = q.m[static_cast<std::size_t>(i)];
  return {(1.0 + mi) / 2.0, (1.0 - mi) / 2.0};
}

}  // namespace bethe_zeta
