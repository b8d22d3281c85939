#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string_view>
#include <vector>

#include "bethe_zeta/bethe.hpp"
#include "bethe_zeta/graph.hpp"
#include "bethe_zeta/linalg.hpp"
#include "bethe_zeta/model.hpp"
#include "bethe_zeta/zeta.hpp"

namespace bethe_zeta {

/// Width of the band around |lambda| = 1 and Re lambda = 1 reported as Indeterminate.
inline constexpr double kStabilityBand = 1e-8;
/// Smallest |det Hessian| at which the index of a stationary point is trusted.
inline constexpr double kDegeneracyFloor = 1e-10;

struct SpectralReport {
  std::vector<Complex> eigenvalues;
  double spectral_radius = 0.0;
  double max_real_part = 0.0;
  bool has_real_geq_one = false;
  /// Multiset distance between spec(UM) and spec(BM); zero up to round-off.
  double similarity_gap = 0.0;
};

inline SpectralReport make_spectral_report(std::vector<Complex> ev) {
  SpectralReport r;
  r.eigenvalues = std::move(ev);
  r.spectral_radius = spectral_radius(r.eigenvalues);
  r.max_real_part = r.eigenvalues.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
  for (const auto& z : r.eigenvalues) {
    r.max_real_part = std::max(r.max_real_part, z.real());
    if (std::abs(z.imag()) <= 1e-9 && z.real() >= 1.0 - 1e-9) r.has_real_geq_one = true;
  }
  return r;
}

/// Eigenvalues of UM with u from the pseudomarginals, cross-checked against BM.
inline SpectralReport spectrum_um(const Graph& g, const Pseudomarginals& q) {
  require_interior(g, q, "spectrum_um");
  auto r = make_spectral_report(weighted_nonbacktracking_spectrum(g, weights_from_pseudomarginals(g, q).u));
  const auto beta = directed_from_undirected(g, beta_weights(g, q));
  r.similarity_gap = multiset_distance(r.eigenvalues, weighted_nonbacktracking_spectrum(g, beta.u));
  return r;
}

enum class PdCertificate { CertifiedPd, Inconclusive };

inline std::string_view to_string(PdCertificate c) {
  return c == PdCertificate::CertifiedPd ? "certified_pd" : "inconclusive";
}

/// Positive definiteness of the Hessian follows when UM has no real eigenvalue >= 1.
inline PdCertificate check_positive_definite_cond(const Graph& g, const Pseudomarginals& q) {
  return spectrum_um(g, q).has_real_geq_one ? PdCertificate::Inconclusive : PdCertificate::CertifiedPd;
}

struct BetaRegion {
  bool inside = false;
  double max_abs_beta = 0.0;
  double alpha = 0.0;
  /// 1/alpha, infinite on trees.
  double threshold = 0.0;
};

/// Membership of q in {max |beta_e| < 1/alpha}, a sufficient condition for a PD Hessian.
inline BetaRegion check_beta_region(const Graph& g, const Pseudomarginals& q) {
  require_interior(g, q, "check_beta_region");
  BetaRegion r;
  for (double b : beta_weights(g, q)) r.max_abs_beta = std::max(r.max_abs_beta, std::abs(b));
  r.alpha = perron_eigenvalue(g);
  r.threshold = r.alpha > 1e-12 ? 1.0 / r.alpha : std::numeric_limits<double>::infinity();
  r.inside = r.max_abs_beta < r.threshold;
  return r;
}

enum class Stability { StableUndamped, StableWithDamping, Unstable, Indeterminate };

inline std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::StableUndamped: return "StableUndamped";
    case Stability::StableWithDamping: return "StableWithDamping";
    case Stability::Unstable: return "Unstable";
    case Stability::Indeterminate: return "Indeterminate";
  }
  return "?";
}

inline Stability stability_class(const SpectralReport& s, double band = kStabilityBand) {
  if (s.spectral_radius < 1.0 - band) return Stability::StableUndamped;
  if (s.spectral_radius <= 1.0 + band) return Stability::Indeterminate;
  if (s.max_real_part < 1.0 - band) return Stability::StableWithDamping;
  if (s.max_real_part <= 1.0 + band) return Stability::Indeterminate;
  return Stability::Unstable;
}

struct FixedPointRecord {
  Pseudomarginals q;
  double grad_norm = 0.0;
  int hessian_det_sign = 0;
  double log_abs_det = 0.0;
  /// sign(det Hessian); the stationary-point index.
  int index = 0;
  Stability stability = Stability::Indeterminate;
  SpectralReport spectrum;
  PdCertificate pd_certificate = PdCertificate::Inconclusive;
  double min_hessian_eigenvalue = 0.0;

  bool degenerate() const { return log_abs_det < std::log(kDegeneracyFloor); }
  bool local_minimum() const { return min_hessian_eigenvalue > 0.0; }
};

/// Classifies a refined stationary point; the gradient norm is taken from the model.
inline FixedPointRecord classify_stability(const BinaryPairwiseModel& model, const Pseudomarginals& q) {
  const Graph& g = model.graph;
  FixedPointRecord r;
  r.q = q;
  const Vector grad = gradient(model, q);
  r.grad_norm = grad.size() == 0 ? 0.0 : grad.cwiseAbs().maxCoeff();
  const Matrix h = hessian(g, q).full;
  const auto det = signed_log_det(h);
  r.hessian_det_sign = det.sign;
  r.log_abs_det = det.log_abs;
  r.index = det.sign;
  r.min_hessian_eigenvalue = min_symmetric_eigenvalue(h);
  r.spectrum = spectrum_um(g, q);
  r.stability = stability_class(r.spectrum);
  r.pd_certificate = r.spectrum.has_real_geq_one ? PdCertificate::Inconclusive : PdCertificate::CertifiedPd;
  return r;
}

}  // namespace bethe_zeta
