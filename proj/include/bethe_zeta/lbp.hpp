#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "bethe_zeta/bethe.hpp"
#include "bethe_zeta/error.hpp"
#include "bethe_zeta/linalg.hpp"
#include "bethe_zeta/model.hpp"

namespace bethe_zeta {

/// LBP state: log eta_e = log(mu_e(+1) / mu_e(-1)) for every directed edge.
struct MessageState {
  Vector log_eta;

  static MessageState uniform(const Graph& g) { return {Vector::Zero(g.num_directed())}; }

  static MessageState random(const Graph& g, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-scale, scale);
    MessageState s{Vector(g.num_directed())};
    for (Eigen::Index e = 0; e < s.log_eta.size(); ++e) s.log_eta(e) = dist(rng);
    return s;
  }

  double eta(int e) const { return std::exp(log_eta(e)); }
};

inline constexpr double kLogMessageBound = 700.0;

namespace detail {

/// log cosh(x) without overflow.
inline double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

inline void check_messages(const MessageState& s, const char* op) {
  for (Eigen::Index e = 0; e < s.log_eta.size(); ++e) {
    const double v = s.log_eta(e);
    if (!std::isfinite(v) || std::abs(v) > kLogMessageBound)
      fail(ErrorKind::NumericalOverflow, op, "log message " + std::to_string(e) + " = " + std::to_string(v));
  }
}

inline void require_loopless(const BinaryPairwiseModel& model, const char* op) {
  for (const auto& e : model.graph.edges()) {
    if (e.u == e.v) fail(ErrorKind::SelfLoop, op, "message passing needs a graph without self-loops");
  }
}

/// Total field at each vertex: h_i + 1/2 sum of incoming log messages.
inline std::vector<double> vertex_fields(const BinaryPairwiseModel& model, const Vector& log_eta) {
  const Graph& g = model.graph;
  std::vector<double> field(model.field);
  for (int e = 0; e < g.num_directed(); ++e) field[static_cast<std::size_t>(g.terminus(e))] += 0.5 * log_eta(e);
  return field;
}

inline Vector update_map(const BinaryPairwiseModel& model, const Vector& log_eta) {
  const Graph& g = model.graph;
  const auto field = vertex_fields(model, log_eta);
  Vector out(g.num_directed());
  for (int e = 0; e < g.num_directed(); ++e) {
    // Cavity field at the origin, leaving out the message coming back along e.
    const double cavity = field[static_cast<std::size_t>(g.origin(e))] - 0.5 * log_eta(Graph::inverse(e));
    const double j = model.coupling[static_cast<std::size_t>(Graph::undirected(e))];
    out(e) = log_cosh(cavity + j) - log_cosh(cavity - j);
  }
  return out;
}

}  // namespace detail

/// One parallel sweep of the sum-product update in log-ratio form.
inline MessageState lbp_step(const BinaryPairwiseModel& model, const MessageState& state) {
  detail::require_loopless(model, "lbp_step");
  detail::check_messages(state, "lbp_step");
  MessageState next{detail::update_map(model, state.log_eta)};
  detail::check_messages(next, "lbp_step");
  return next;
}

/// Normalized pair belief over (++, +-, -+, --) for edge k.
inline std::array<double, 4> pair_belief(const BinaryPairwiseModel& model, const MessageState& state, int k) {
  const Graph& g = model.graph;
  const auto field = detail::vertex_fields(model, state.log_eta);
  const auto& e = g.edge(k);
  const double theta_u = field[static_cast<std::size_t>(e.u)] - 0.5 * state.log_eta(2 * k + 1);
  const double theta_v = field[static_cast<std::size_t>(e.v)] - 0.5 * state.log_eta(2 * k);
  const double j = model.coupling[static_cast<std::size_t>(k)];
  std::array<double, 4> logw{};
  for (std::size_t s = 0; s < 4; ++s) {
    const int x = kPairSpins[s][0];
    const int y = kPairSpins[s][1];
    logw[s] = j * x * y + theta_u * x + theta_v * y;
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double z = 0.0;
  for (auto& w : logw) {
    w = std::exp(w - top);
    z += w;
  }
  for (auto& w : logw) w /= z;
  return logw;
}

/// Beliefs in (m, chi) coordinates: m from the vertex beliefs, chi from the
/// pair beliefs.
inline Pseudomarginals beliefs(const BinaryPairwiseModel& model, const MessageState& state) {
  const Graph& g = model.graph;
  const auto field = detail::vertex_fields(model, state.log_eta);
  Pseudomarginals q;
  q.m.resize(static_cast<std::size_t>(g.num_vertices()));
  for (int i = 0; i < g.num_vertices(); ++i) q.m[static_cast<std::size_t>(i)] = std::tanh(field[static_cast<std::size_t>(i)]);
  q.chi.resize(static_cast<std::size_t>(g.num_edges()));
  for (int k = 0; k < g.num_edges(); ++k) {
    const auto p = pair_belief(model, state, k);
    q.chi[static_cast<std::size_t>(k)] = (p[0] + p[3]) - (p[1] + p[2]);
  }
  return q;
}

struct LbpOptions {
  double damping = 0.0;
  double tol = 1e-10;
  int max_iter = 10000;
};

struct LbpResult {
  MessageState state;
  bool converged = false;
  int iterations = 0;
  /// max |T(log eta) - log eta| at the returned state.
  double residual = 0.0;
  Pseudomarginals beliefs;
};

/// Iterates the damped map log eta <- (1-eps) T(log eta) + eps log eta.
/// Non-convergence is reported through `converged`, not thrown.
inline LbpResult lbp_run(const BinaryPairwiseModel& model, const MessageState& init, const LbpOptions& opts = {}) {
  const char* op = "lbp_run";
  detail::require_loopless(model, op);
  if (!(opts.damping >= 0.0 && opts.damping < 1.0)) fail(ErrorKind::InvalidArgument, op, "damping must lie in [0, 1)");
  if (!(opts.tol > 0.0)) fail(ErrorKind::InvalidArgument, op, "tol must be positive");
  if (init.log_eta.size() != model.graph.num_directed())
    fail(ErrorKind::InvalidArgument, op, "initial state has the wrong size");
  detail::check_messages(init, op);

  LbpResult r;
  Vector x = init.log_eta;
  Vector tx = detail::update_map(model, x);
  r.residual = x.size() == 0 ? 0.0 : (tx - x).cwiseAbs().maxCoeff();
  while (r.residual > opts.tol && r.iterations < opts.max_iter) {
    x = (1.0 - opts.damping) * tx + opts.damping * x;
    r.state.log_eta = x;
    detail::check_messages(r.state, op);
    tx = detail::update_map(model, x);
    r.residual = x.size() == 0 ? 0.0 : (tx - x).cwiseAbs().maxCoeff();
    ++r.iterations;
  }
  r.state.log_eta = x;
  r.converged = r.residual <= opts.tol;
  r.beliefs = beliefs(model, r.state);
  return r;
}

/// Central-difference Jacobian of log eta -> T(log eta), step
/// eps^(1/3) max(1, |log eta_e|).
inline Matrix linearize_update(const BinaryPairwiseModel& model, const MessageState& state) {
  detail::require_loopless(model, "linearize_update");
  const Eigen::Index d = state.log_eta.size();
  Matrix jac(d, d);
  const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  for (Eigen::Index c = 0; c < d; ++c) {
    const double h = base * std::max(1.0, std::abs(state.log_eta(c)));
    Vector plus = state.log_eta;
    Vector minus = state.log_eta;
    plus(c) += h;
    minus(c) -= h;
    jac.col(c) = (detail::update_map(model, plus) - detail::update_map(model, minus)) / (2.0 * h);
  }
  return jac;
}

struct RefineOptions {
  double tol = 1e-10;
  int max_iter = 200;
};

/// Newton iteration on grad F = 0 inside L(G).
///
/// Steps are halved until the trial point stays above the interior floor and
/// the merit 1/2 |grad F|^2 decreases (Armijo). The Newton direction is a
/// descent direction for that merit whenever the Hessian is invertible, so
/// saddles are found as readily as minima.
inline Pseudomarginals refine_fixed_point(const BinaryPairwiseModel& model, const Pseudomarginals& approx,
                                          const RefineOptions& opts = {}) {
  const char* op = "refine_fixed_point";
  const Graph& g = model.graph;
  if (!(opts.tol > 0.0)) fail(ErrorKind::InvalidArgument, op, "tol must be positive");
  if (in_domain(g, approx).margin < kDomainFloor) fail(ErrorKind::OutOfDomain, op, "start point is not interior");

  Pseudomarginals q = approx;
  Vector grad = gradient(model, q);
  for (int it = 0; it < opts.max_iter; ++it) {
    const double gnorm = grad.size() == 0 ? 0.0 : grad.cwiseAbs().maxCoeff();
    if (gnorm <= opts.tol) return q;

    const Eigen::PartialPivLU<Matrix> lu(hessian(g, q).full);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-16)) fail(ErrorKind::SingularHessian, op, "rcond " + fmt(rcond));
    const Vector step = -lu.solve(grad);
    if (!step.allFinite()) fail(ErrorKind::SingularHessian, op, "non-finite Newton step");

    const double merit = 0.5 * grad.squaredNorm();
    const Vector x = pack(q);
    bool any_interior = false;
    bool accepted = false;
    double alpha = 1.0;
    for (int halving = 0; halving < 60 && !accepted; ++halving, alpha *= 0.5) {
      const Pseudomarginals trial = unpack(g, x + alpha * step);
      if (in_domain(g, trial).margin < kDomainFloor) continue;
      any_interior = true;
      const Vector trial_grad = gradient(model, trial);
      if (0.5 * trial_grad.squaredNorm() <= (1.0 - 2e-4 * alpha) * merit) {
        q = trial;
        grad = trial_grad;
        accepted = true;
      }
    }
    if (!accepted) {
      if (!any_interior) fail(ErrorKind::LeftDomain, op, "no step length keeps the iterate interior");
      fail(ErrorKind::NotConverged, op, "line search stalled at |grad F| = " + fmt(gnorm));
    }
  }
  const double gnorm = grad.size() == 0 ? 0.0 : grad.cwiseAbs().maxCoeff();
  if (gnorm <= opts.tol) return q;
  fail(ErrorKind::NotConverged, op, "|grad F| = " + fmt(gnorm) + " after max_iter");
}

}  // namespace bethe_zeta
