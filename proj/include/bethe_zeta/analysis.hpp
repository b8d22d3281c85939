#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bethe_zeta/bethe.hpp"
#include "bethe_zeta/error.hpp"
#include "bethe_zeta/fixed_points.hpp"
#include "bethe_zeta/graph.hpp"
#include "bethe_zeta/lbp.hpp"
#include "bethe_zeta/model.hpp"
#include "bethe_zeta/spectral.hpp"
#include "bethe_zeta/zeta.hpp"

namespace bethe_zeta {

enum class CertificateKind { TreeOrOneCycle, SpectralContraction, TwoCycleNonAttractive, None };

inline std::string_view to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::TreeOrOneCycle: return "TreeOrOneCycle";
    case CertificateKind::SpectralContraction: return "SpectralContraction";
    case CertificateKind::TwoCycleNonAttractive: return "TwoCycleNonAttractive";
    case CertificateKind::None: return "None";
  }
  return "?";
}

struct UniquenessCertificate {
  CertificateKind kind = CertificateKind::None;
  int cycle_rank = 0;
  /// rho(diag(tanh|J_e|) M).
  double rho_jm = 0.0;
  /// An edge whose coupling stays negative under every gauge, when one exists.
  std::optional<int> frustrated_edge;
};

/// rho(diag(tanh|J_e|) M).
inline double coupling_contraction_radius(const BinaryPairwiseModel& model) {
  const Graph& g = model.graph;
  std::vector<double> w(static_cast<std::size_t>(g.num_directed()));
  for (int e = 0; e < g.num_directed(); ++e)
    w[static_cast<std::size_t>(e)] = std::tanh(std::abs(model.coupling[static_cast<std::size_t>(Graph::undirected(e))]));
  return spectral_radius(weighted_nonbacktracking_spectrum(g, w));
}

/// Sufficient conditions for a unique LBP fixed point, tried in order.
inline UniquenessCertificate uniqueness_certificate(const BinaryPairwiseModel& model) {
  UniquenessCertificate c;
  c.cycle_rank = cycle_rank(model.graph);
  c.rho_jm = coupling_contraction_radius(model);
  c.frustrated_edge = check_frustration(model).frustrated_edge;
  if (c.cycle_rank <= 1) {
    c.kind = CertificateKind::TreeOrOneCycle;
  } else if (c.rho_jm < 1.0) {
    c.kind = CertificateKind::SpectralContraction;
  } else if (c.cycle_rank == 2 && c.frustrated_edge) {
    c.kind = CertificateKind::TwoCycleNonAttractive;
  }
  return c;
}

struct EdgeBetaCheck {
  double beta = 0.0;
  double bound = 0.0;
  bool within_bound = false;
  bool sign_ok = false;
};

struct BetaBoundReport {
  std::vector<EdgeBetaCheck> edges;
  bool all_pass = true;
};

/// |beta_ij| <= tanh|J_ij| with sign(beta_ij) = sign(J_ij) at a fixed point.
inline BetaBoundReport beta_bound_check(const BinaryPairwiseModel& model, const Pseudomarginals& q) {
  const auto beta = beta_weights(model.graph, q);
  BetaBoundReport r;
  for (int k = 0; k < model.num_edges(); ++k) {
    const double j = model.coupling[static_cast<std::size_t>(k)];
    EdgeBetaCheck e;
    e.beta = beta[static_cast<std::size_t>(k)];
    e.bound = std::tanh(std::abs(j));
    e.within_bound = std::abs(e.beta) <= e.bound + 1e-9;
    e.sign_ok = j == 0.0 ? std::abs(e.beta) <= 1e-9 : e.beta * j > 0.0;
    r.all_pass = r.all_pass && e.within_bound && e.sign_ok;
    r.edges.push_back(e);
  }
  return r;
}

struct SweepRow {
  double t = 0.0;
  double max_re_lambda = 0.0;
  double rho = 0.0;
  int det_sign = 0;
  double log_abs_det = 0.0;
  double free_energy = 0.0;
  Pseudomarginals q;
};

/// Bracket [lo, hi] in t containing a threshold crossing.
struct CrossingBracket {
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

struct CrossingReport {
  std::vector<SweepRow> rows;
  double grid_step = 0.0;
  /// Where max Re spec(UM) crosses 1 and where det Hessian changes sign.
  std::vector<CrossingBracket> eigen_crossings;
  std::vector<CrossingBracket> det_crossings;
  /// Every eigenvalue crossing has a determinant crossing with overlapping
  /// brackets (within one bracket width) and the counts agree.
  bool coincide = false;
};

struct SweepOptions {
  double t_start = 2.0;
  double t_end = 0.5;
  int steps = 40;
  int bisections = 20;
  double tol = 1e-11;
};

namespace detail {

inline SweepRow sweep_row(const BinaryPairwiseModel& base, double t, const Pseudomarginals& q) {
  const auto model = temperature_scaled(base, t);
  SweepRow row;
  row.t = t;
  row.q = q;
  const auto spec = spectrum_um(base.graph, q);
  row.max_re_lambda = spec.max_real_part;
  row.rho = spec.spectral_radius;
  const auto det = signed_log_det(hessian(base.graph, q).full);
  row.det_sign = det.sign;
  row.log_abs_det = det.log_abs;
  row.free_energy = free_energy(model, q);
  return row;
}

inline Pseudomarginals track(const BinaryPairwiseModel& base, double t, const Pseudomarginals& from, double tol) {
  try {
    return refine_fixed_point(temperature_scaled(base, t), from, {tol, 200});
  } catch (const Error& e) {
    fail(ErrorKind::ContinuationLost, "saddle_crossing_track",
         "at t = " + fmt(t) + ": " + std::string(e.what()));
  }
}

}  // namespace detail

/// Follows the fixed point that LBP reaches at high temperature while t
/// decreases through [t_end, t_start], and localizes where the largest real
/// eigenvalue of UM crosses 1 and where det Hessian changes sign.
inline CrossingReport saddle_crossing_track(const BinaryPairwiseModel& base, const SweepOptions& opts = {}) {
  const char* op = "saddle_crossing_track";
  if (!is_attractive(base)) fail(ErrorKind::InvalidArgument, op, "the family must be attractive");
  if (!(opts.t_start > opts.t_end && opts.t_end > 0.0) || opts.steps < 1)
    fail(ErrorKind::InvalidArgument, op, "need t_start > t_end > 0 and at least one step");

  const auto hot = temperature_scaled(base, opts.t_start);
  const auto run = lbp_run(hot, MessageState::uniform(base.graph), {0.5, 1e-12, 100000});
  if (!run.converged) fail(ErrorKind::ContinuationLost, op, "LBP did not converge at t_start");

  CrossingReport r;
  r.grid_step = (opts.t_start - opts.t_end) / opts.steps;
  Pseudomarginals q = detail::track(base, opts.t_start, run.beliefs, opts.tol);
  r.rows.push_back(detail::sweep_row(base, opts.t_start, q));
  for (int s = 1; s <= opts.steps; ++s) {
    const double t = opts.t_start - s * r.grid_step;
    q = detail::track(base, t, q, opts.tol);
    r.rows.push_back(detail::sweep_row(base, t, q));
  }

  // Bisect on t inside [t_next, t_prev], continuing from the point at t_prev.
  auto bisect = [&](const SweepRow& prev, const SweepRow& next, auto above) {
    double hi = prev.t;
    double lo = next.t;
    Pseudomarginals q_hi = prev.q;
    const bool side_hi = above(prev);
    for (int b = 0; b < opts.bisections; ++b) {
      const double mid = 0.5 * (lo + hi);
      const auto q_mid = detail::track(base, mid, q_hi, opts.tol);
      const auto row = detail::sweep_row(base, mid, q_mid);
      if (above(row) == side_hi) {
        hi = mid;
        q_hi = q_mid;
      } else {
        lo = mid;
      }
    }
    return CrossingBracket{lo, hi};
  };
  auto eigen_above = [](const SweepRow& row) { return row.max_re_lambda >= 1.0; };
  auto det_positive = [](const SweepRow& row) { return row.det_sign > 0; };

  for (std::size_t s = 1; s < r.rows.size(); ++s) {
    if (eigen_above(r.rows[s - 1]) != eigen_above(r.rows[s]))
      r.eigen_crossings.push_back(bisect(r.rows[s - 1], r.rows[s], eigen_above));
    if (det_positive(r.rows[s - 1]) != det_positive(r.rows[s]))
      r.det_crossings.push_back(bisect(r.rows[s - 1], r.rows[s], det_positive));
  }

  r.coincide = r.eigen_crossings.size() == r.det_crossings.size();
  for (std::size_t c = 0; r.coincide && c < r.eigen_crossings.size(); ++c) {
    const auto& a = r.eigen_crossings[c];
    const auto& b = r.det_crossings[c];
    const double slack = std::max(a.width(), b.width());
    r.coincide = a.lo <= b.hi + slack && b.lo <= a.hi + slack;
  }
  return r;
}

}  // namespace bethe_zeta
