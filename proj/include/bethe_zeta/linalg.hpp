#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace bethe_zeta {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;

/// Determinant stored as sign * exp(log_abs). A zero determinant has sign 0
/// and log_abs = -inf.
struct SignedLogDet {
  int sign = 1;
  double log_abs = 0.0;

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

  SignedLogDet& operator*=(const SignedLogDet& o) {
    sign *= o.sign;
    log_abs += o.log_abs;
    return *this;
  }
};

inline SignedLogDet signed_log_det(const Matrix& a) {
  if (a.rows() == 0) return {};
  Eigen::PartialPivLU<Matrix> lu(a);
  SignedLogDet out;
  out.sign = static_cast<int>(lu.permutationP().determinant());
  const Matrix& packed = lu.matrixLU();
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    const double d = packed(i, i);
    if (d == 0.0 || !std::isfinite(d)) {
      return {0, -std::numeric_limits<double>::infinity()};
    }
    if (d < 0) out.sign = -out.sign;
    out.log_abs += std::log(std::abs(d));
  }
  return out;
}

/// Eigenvalues sorted by (real, imag) so multisets compare positionally in
/// the common well-separated case.
inline std::vector<Complex> eigenvalues(const Matrix& a) {
  std::vector<Complex> out;
  if (a.rows() == 0) return out;
  Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  const auto& ev = solver.eigenvalues();
  out.assign(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return out;
}

inline double spectral_radius(const std::vector<Complex>& ev) {
  double r = 0.0;
  for (const auto& z : ev) r = std::max(r, std::abs(z));
  return r;
}

/// Largest distance between paired elements after greedily matching each
/// element of `a` to its nearest unused element of `b`. Infinity when the
/// sizes differ.
inline double multiset_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const auto& z : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(z - b[j]);
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    used[best_j] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

inline double min_symmetric_eigenvalue(const Matrix& a) {
  if (a.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace bethe_zeta
