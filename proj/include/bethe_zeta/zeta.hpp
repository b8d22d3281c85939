#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bethe_zeta/bethe.hpp"
#include "bethe_zeta/error.hpp"
#include "bethe_zeta/graph.hpp"
#include "bethe_zeta/linalg.hpp"
#include "bethe_zeta/prime_cycles.hpp"
#include "bethe_zeta/spanning_trees.hpp"

namespace bethe_zeta {

/// One weight per directed edge.
struct EdgeWeights {
  std::vector<double> u;

  static EdgeWeights constant(const Graph& g, double value) {
    return {std::vector<double>(static_cast<std::size_t>(g.num_directed()), value)};
  }
  double max_abs() const {
    double r = 0.0;
    for (double v : u) r = std::max(r, std::abs(v));
    return r;
  }
};

/// u_{i->j} = (chi_ij - m_i m_j) / (1 - m_j^2); the variance is taken at the
/// terminus.
inline EdgeWeights weights_from_pseudomarginals(const Graph& g, const Pseudomarginals& q) {
  require_interior(g, q, "weights_from_pseudomarginals");
  EdgeWeights w{std::vector<double>(static_cast<std::size_t>(g.num_directed()))};
  for (int e = 0; e < g.num_directed(); ++e) {
    const int i = g.origin(e);
    const int j = g.terminus(e);
    const double mi = q.m[static_cast<std::size_t>(i)];
    const double mj = q.m[static_cast<std::size_t>(j)];
    const double cov = q.chi[static_cast<std::size_t>(Graph::undirected(e))] - mi * mj;
    w.u[static_cast<std::size_t>(e)] = cov / (1.0 - mj * mj);
  }
  return w;
}

/// Correlation coefficient of each edge's pair belief, one per undirected edge.
inline std::vector<double> beta_weights(const Graph& g, const Pseudomarginals& q) {
  require_interior(g, q, "beta_weights");
  std::vector<double> beta(static_cast<std::size_t>(g.num_edges()));
  for (int k = 0; k < g.num_edges(); ++k) {
    const auto& e = g.edge(k);
    const double mi = q.m[static_cast<std::size_t>(e.u)];
    const double mj = q.m[static_cast<std::size_t>(e.v)];
    const double cov = q.chi[static_cast<std::size_t>(k)] - mi * mj;
    beta[static_cast<std::size_t>(k)] = cov / std::sqrt((1.0 - mi * mi) * (1.0 - mj * mj));
  }
  return beta;
}

/// Symmetric per-undirected-edge weights spread onto both orientations.
inline EdgeWeights directed_from_undirected(const Graph& g, const std::vector<double>& per_edge) {
  EdgeWeights w{std::vector<double>(static_cast<std::size_t>(g.num_directed()))};
  for (int e = 0; e < g.num_directed(); ++e) w.u[static_cast<std::size_t>(e)] = per_edge[static_cast<std::size_t>(Graph::undirected(e))];
  return w;
}

inline Matrix weighted_edge_matrix(const Graph& g, const EdgeWeights& w) {
  if (static_cast<int>(w.u.size()) != g.num_directed())
    fail(ErrorKind::InvalidArgument, "weighted_edge_matrix", "need one weight per directed edge");
  Matrix um = directed_edge_matrix(g);
  for (int e = 0; e < g.num_directed(); ++e) um.row(e) *= w.u[static_cast<std::size_t>(e)];
  return um;
}

/// det(I - U M) in sign/log form.
inline SignedLogDet zeta_det_log(const Graph& g, const EdgeWeights& w) {
  const Matrix um = weighted_edge_matrix(g, w);
  return signed_log_det(Matrix::Identity(um.rows(), um.cols()) - um);
}

/// det(I - U M), the reciprocal of the edge zeta function.
inline double zeta_det(const Graph& g, const EdgeWeights& w) {
  const Matrix um = weighted_edge_matrix(g, w);
  if (um.rows() == 0) return 1.0;
  return (Matrix::Identity(um.rows(), um.cols()) - um).partialPivLu().determinant();
}

/// The vertex operators D' and A' of the multivariable Ihara formula.
struct IharaOperators {
  Matrix d_prime;
  Matrix a_prime;
  double edge_factor = 1.0;  // product over undirected edges of (1 - u_e u_ebar)
};

inline IharaOperators ihara_operators(const Graph& g, const EdgeWeights& w) {
  if (static_cast<int>(w.u.size()) != g.num_directed())
    fail(ErrorKind::InvalidArgument, "zeta_ihara", "need one weight per directed edge");
  const int n = g.num_vertices();
  IharaOperators ops{Matrix::Zero(n, n), Matrix::Zero(n, n), 1.0};
  for (int k = 0; k < g.num_edges(); ++k) {
    const double pair = w.u[static_cast<std::size_t>(2 * k)] * w.u[static_cast<std::size_t>(2 * k + 1)];
    if (std::abs(1.0 - pair) < 1e-12)
      fail(ErrorKind::SingularPair, "zeta_ihara", "u_e u_ebar = 1 on edge " + std::to_string(k));
    ops.edge_factor *= 1.0 - pair;
  }
  for (int e = 0; e < g.num_directed(); ++e) {
    const double ue = w.u[static_cast<std::size_t>(e)];
    const double pair = ue * w.u[static_cast<std::size_t>(Graph::inverse(e))];
    const int t = g.terminus(e);
    ops.d_prime(t, t) += pair / (1.0 - pair);
    ops.a_prime(t, g.origin(e)) += ue / (1.0 - pair);
  }
  return ops;
}

/// det(I + D' - A') * prod (1 - u_e u_ebar): the N x N route to det(I - U M).
inline double zeta_ihara(const Graph& g, const EdgeWeights& w) {
  const auto ops = ihara_operators(g, w);
  const int n = g.num_vertices();
  const Matrix core = Matrix::Identity(n, n) + ops.d_prime - ops.a_prime;
  return core.partialPivLu().determinant() * ops.edge_factor;
}

/// Single-variable Ihara form (1-u^2)^M det(I + u^2/(1-u^2) D - u/(1-u^2) A).
inline double ihara_classical(const Graph& g, double u) {
  const int n = g.num_vertices();
  Matrix deg = Matrix::Zero(n, n);
  Matrix adj = Matrix::Zero(n, n);
  for (int e = 0; e < g.num_directed(); ++e) {
    deg(g.terminus(e), g.terminus(e)) += 1.0;
    adj(g.terminus(e), g.origin(e)) += 1.0;
  }
  const double s = 1.0 - u * u;
  const Matrix core = Matrix::Identity(n, n) + (u * u / s) * deg - (u / s) * adj;
  return std::pow(s, g.num_edges()) * core.partialPivLu().determinant();
}

/// det(I + U iota), where iota swaps each directed edge with its inverse.
inline double edge_pair_determinant(const Graph& g, const EdgeWeights& w) {
  const int d = g.num_directed();
  Matrix a = Matrix::Identity(d, d);
  for (int e = 0; e < d; ++e) a(e, Graph::inverse(e)) += w.u[static_cast<std::size_t>(e)];
  return d == 0 ? 1.0 : a.partialPivLu().determinant();
}

struct TruncatedProduct {
  double value = 1.0;        // prod over prime cycles of length <= max_len of (1 - g(p))
  double bound = 0.0;        // bound on |det(I - U M) - value|
  int max_len = 0;
  std::size_t num_cycles = 0;
};

/// Truncated prime-cycle product with a geometric tail bound.
///
/// Prime cycles of length k number at most tr(M^k)/k <= 2M alpha^k / k, and
/// |g(p)| <= r^k with r = max |u_e|. With x = r alpha < 1, the discarded
/// factors contribute at most
///   B = 2M x^(L+1) / ((L+1) (1-x) (1-x^(L+1)))
/// to |log| of the product, hence |det - value| <= |value| (e^B - 1).
inline TruncatedProduct zeta_product_truncated(const Graph& g, const EdgeWeights& w, int max_len,
                                               std::size_t cycle_cap = kDefaultPrimeCycleCap) {
  const double alpha = perron_eigenvalue(g);
  const double x = w.max_abs() * alpha;
  if (!(x < 1.0))
    fail(ErrorKind::InvalidArgument, "zeta_product_truncated",
         "max|u| * rho(M) = " + fmt(x) + " is not below 1");
  TruncatedProduct out;
  out.max_len = max_len;
  const auto cycles = enumerate_prime_cycles(g, max_len, cycle_cap);
  out.num_cycles = cycles.size();
  for (const auto& p : cycles) {
    double gp = 1.0;
    for (int e : p.edges) gp *= w.u[static_cast<std::size_t>(e)];
    out.value *= 1.0 - gp;
  }
  if (alpha > 0.0 && x > 0.0) {
    const double tail = std::pow(x, max_len + 1);
    const double b = 2.0 * g.num_edges() * tail / ((max_len + 1.0) * (1.0 - x) * (1.0 - tail));
    out.bound = std::abs(out.value) * std::expm1(b);
  }
  return out;
}

struct MainFormulaReport {
  SignedLogDet lhs;   // det(I - U M)
  SignedLogDet rhs;   // det(Hessian) * prod b_ij * prod b_i^(1-d_i) * 2^(2N+4M)
  double log_residual = 0.0;  // log|lhs| - log|rhs|
  bool signs_agree = false;
};

/// Evaluates both sides of the Hessian/zeta identity at q.
inline MainFormulaReport verify_main_formula(const Graph& g, const Pseudomarginals& q) {
  const auto dom = in_domain(g, q);
  if (dom.margin < 1e-6)
    fail(ErrorKind::OutOfDomain, "verify_main_formula", "margin " + fmt(dom.margin) + " below 1e-6");
  MainFormulaReport r;
  r.lhs = zeta_det_log(g, weights_from_pseudomarginals(g, q));
  r.rhs = signed_log_det(hessian(g, q).full);
  double log_factor = (2.0 * g.num_vertices() + 4.0 * g.num_edges()) * std::log(2.0);
  for (int k = 0; k < g.num_edges(); ++k) {
    for (double f : pair_forms(g, q, k)) log_factor += std::log(f / 4.0);
  }
  for (int i = 0; i < g.num_vertices(); ++i) {
    const auto b = node_belief(q, i);
    log_factor += (1.0 - g.degree(i)) * (std::log(b[0]) + std::log(b[1]));
  }
  r.rhs.log_abs += log_factor;
  r.log_residual = r.lhs.log_abs - r.rhs.log_abs;
  r.signs_agree = r.lhs.sign == r.rhs.sign;
  return r;
}

/// The zeta function in its three forms for one weight vector.
struct ZetaReport {
  double det_form = 1.0;
  /// Absent when some u_e u_ebar is within 1e-12 of 1.
  std::optional<double> ihara_form;
  std::optional<TruncatedProduct> product_form;
  /// Present when the weights come from pseudomarginals.
  std::optional<MainFormulaReport> main_formula;
};

/// Pass max_len > 0 to include the truncated product.
inline ZetaReport zeta_report(const Graph& g, const EdgeWeights& w, int max_len = 0) {
  ZetaReport r;
  r.det_form = zeta_det(g, w);
  try {
    r.ihara_form = zeta_ihara(g, w);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SingularPair) throw;
  }
  if (max_len > 0) r.product_form = zeta_product_truncated(g, w, max_len);
  return r;
}

struct HashimotoCheck {
  double extrapolated = 0.0;
  double predicted = 0.0;
  std::vector<double> t;        // sample points 1 - 2^-k
  std::vector<double> scaled;   // det(Hessian(t)) (1-t)^(M+N-1)
  std::vector<double> richardson;  // second-level extrapolants

  double abs_error() const { return std::abs(extrapolated - predicted); }
  double rel_error() const {
    return predicted == 0.0 ? abs_error() : abs_error() / std::abs(predicted);
  }
};

/// Limit of det(Hessian) (1-t)^(M+N-1) along m = 0, chi = t as t -> 1,
/// compared with -2^(-M-N+1) (M-N) kappa(G).
inline HashimotoCheck hashimoto_limit_check(const Graph& g, int k_min = 4, int k_max = 12) {
  const std::string op = "hashimoto_limit_check";
  const int n = g.num_vertices();
  const int m = g.num_edges();
  if (m < n) fail(ErrorKind::InvalidArgument, op, "requires M - N >= 0");
  if (k_max - k_min < 3) fail(ErrorKind::InvalidArgument, op, "need at least four sample points");
  HashimotoCheck out;
  const double kappa = static_cast<double>(spanning_tree_count(g));
  out.predicted = -std::pow(2.0, -m - n + 1) * (m - n) * kappa;
  for (int k = k_min; k <= k_max; ++k) {
    const double one_minus_t = std::ldexp(1.0, -k);
    const double t = 1.0 - one_minus_t;
    Pseudomarginals q{std::vector<double>(static_cast<std::size_t>(n), 0.0),
                      std::vector<double>(static_cast<std::size_t>(m), t)};
    const auto det = signed_log_det(hessian(g, q).full);
    out.t.push_back(t);
    out.scaled.push_back(det.sign * std::exp(det.log_abs + (m + n - 1) * std::log(one_minus_t)));
  }
  // Halving 1-t: the first level removes the linear term, the second the
  // quadratic one.
  std::vector<double> level1;
  for (std::size_t i = 0; i + 1 < out.scaled.size(); ++i) level1.push_back(2.0 * out.scaled[i + 1] - out.scaled[i]);
  for (std::size_t i = 0; i + 1 < level1.size(); ++i) out.richardson.push_back((4.0 * level1[i + 1] - level1[i]) / 3.0);
  out.extrapolated = out.richardson.back();

  const double slack = 1e-9 * std::max(1.0, std::abs(out.extrapolated));
  for (std::size_t i = 2; i < out.richardson.size(); ++i) {
    const double prev = std::abs(out.richardson[i - 1] - out.richardson[i - 2]);
    const double cur = std::abs(out.richardson[i] - out.richardson[i - 1]);
    if (cur > prev + slack)
      fail(ErrorKind::NumericalInstability, op, "extrapolants stopped converging at sample " + std::to_string(i));
  }
  return out;
}

}  // namespace bethe_zeta
