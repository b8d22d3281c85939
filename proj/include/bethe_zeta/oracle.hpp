#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "bethe_zeta/bethe.hpp"
#include "bethe_zeta/error.hpp"
#include "bethe_zeta/linalg.hpp"
#include "bethe_zeta/model.hpp"

namespace bethe_zeta {

inline constexpr int kMaxExactVertices = 20;

/// Exact partition function and marginals by enumerating all 2^N states.
struct ExactInference {
  double log_z = 0.0;
  /// p_i(+1), p_i(-1).
  std::vector<std::array<double, 2>> marginals;
  /// p_ij over (++, +-, -+, --) with (i, j) = (edge.u, edge.v).
  std::vector<std::array<double, 4>> pair_marginals;

  double z() const { return std::exp(log_z); }

  /// Exact marginals in (m, chi) coordinates.
  Pseudomarginals moments() const {
    Pseudomarginals q;
    for (const auto& p : marginals) q.m.push_back(p[0] - p[1]);
    for (const auto& p : pair_marginals) q.chi.push_back((p[0] + p[3]) - (p[1] + p[2]));
    return q;
  }
};

inline ExactInference exact_inference(const BinaryPairwiseModel& model) {
  const Graph& g = model.graph;
  const int n = g.num_vertices();
  if (n > kMaxExactVertices)
    fail(ErrorKind::TooLarge, "exact_inference", "N = " + std::to_string(n) + " exceeds " + std::to_string(kMaxExactVertices));

  const std::uint64_t states = std::uint64_t{1} << n;
  auto spin = [](std::uint64_t s, int i) { return ((s >> i) & 1U) ? -1 : 1; };
  std::vector<double> log_w(states);
  double top = -std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < states; ++s) {
    double e = 0.0;
    for (int k = 0; k < g.num_edges(); ++k) {
      const auto& ed = g.edge(k);
      e += model.coupling[static_cast<std::size_t>(k)] * spin(s, ed.u) * spin(s, ed.v);
    }
    for (int i = 0; i < n; ++i) e += model.field[static_cast<std::size_t>(i)] * spin(s, i);
    log_w[s] = e;
    top = std::max(top, e);
  }

  ExactInference out;
  out.marginals.assign(static_cast<std::size_t>(n), {0.0, 0.0});
  out.pair_marginals.assign(static_cast<std::size_t>(g.num_edges()), {0.0, 0.0, 0.0, 0.0});
  double total = 0.0;
  for (std::uint64_t s = 0; s < states; ++s) {
    const double w = std::exp(log_w[s] - top);
    total += w;
    for (int i = 0; i < n; ++i) out.marginals[static_cast<std::size_t>(i)][spin(s, i) > 0 ? 0 : 1] += w;
    for (int k = 0; k < g.num_edges(); ++k) {
      const auto& ed = g.edge(k);
      const int slot = (spin(s, ed.u) > 0 ? 0 : 2) + (spin(s, ed.v) > 0 ? 0 : 1);
      out.pair_marginals[static_cast<std::size_t>(k)][static_cast<std::size_t>(slot)] += w;
    }
  }
  for (auto& p : out.marginals) {
    for (auto& v : p) v /= total;
  }
  for (auto& p : out.pair_marginals) {
    for (auto& v : p) v /= total;
  }
  out.log_z = top + std::log(total);
  return out;
}

/// F(q) - (-log Z): zero at the exact marginals of a tree, generally not on loopy graphs.
inline double gibbs_free_energy_check(const BinaryPairwiseModel& model, const Pseudomarginals& q) {
  const auto exact = exact_inference(model);
  return free_energy(model, q) + exact.log_z;
}

using ScalarField = std::function<double(const Pseudomarginals&)>;
using VectorField = std::function<Vector(const Pseudomarginals&)>;

namespace detail {

inline void require_fd_margin(const Graph& g, const Pseudomarginals& q, double step, const char* op) {
  const double margin = in_domain(g, q).margin;
  if (!(margin > 10.0 * step))
    fail(ErrorKind::OutOfDomain, op, "margin " + fmt(margin) + " too small for step " + fmt(step));
}

}  // namespace detail

/// Central-difference gradient with step eps^(1/3).
inline Vector finite_difference_gradient(const Graph& g, const ScalarField& f, const Pseudomarginals& q) {
  const double h = std::cbrt(std::numeric_limits<double>::epsilon());
  detail::require_fd_margin(g, q, h, "finite_difference_gradient");
  const Vector x = pack(q);
  Vector out(x.size());
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    Vector plus = x, minus = x;
    plus(a) += h;
    minus(a) -= h;
    out(a) = (f(unpack(g, plus)) - f(unpack(g, minus))) / (2.0 * h);
  }
  return out;
}

/// Central-difference Hessian with step eps^(1/4), symmetric by construction.
inline Matrix finite_difference_hessian(const Graph& g, const ScalarField& f, const Pseudomarginals& q) {
  const double h = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
  detail::require_fd_margin(g, q, 2.0 * h, "finite_difference_hessian");
  const Vector x = pack(q);
  const Eigen::Index d = x.size();
  auto at = [&](Eigen::Index a, double da, Eigen::Index b, double db) {
    Vector y = x;
    y(a) += da;
    y(b) += db;
    return f(unpack(g, y));
  };
  Matrix out(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a; b < d; ++b) {
      const double v = (at(a, h, b, h) - at(a, h, b, -h) - at(a, -h, b, h) + at(a, -h, b, -h)) / (4.0 * h * h);
      out(a, b) = out(b, a) = v;
    }
  }
  return out;
}

/// Central-difference Jacobian of a vector field with step eps^(1/3).
inline Matrix finite_difference_jacobian(const Graph& g, const VectorField& f, const Pseudomarginals& q) {
  const double h = std::cbrt(std::numeric_limits<double>::epsilon());
  detail::require_fd_margin(g, q, h, "finite_difference_jacobian");
  const Vector x = pack(q);
  Matrix out;
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    Vector plus = x, minus = x;
    plus(a) += h;
    minus(a) -= h;
    const Vector col = (f(unpack(g, plus)) - f(unpack(g, minus))) / (2.0 * h);
    if (a == 0) out.resize(col.size(), x.size());
    out.col(a) = col;
  }
  return out;
}

/// max |a - b| / max(max |b|, tiny), the norm-wise relative error used by the checks.
inline double relative_error(const Matrix& a, const Matrix& b) {
  if (a.size() == 0) return 0.0;
  const double scale = std::max(b.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace bethe_zeta
