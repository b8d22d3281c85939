#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bethe_zeta/bethe.hpp"
#include "bethe_zeta/error.hpp"
#include "bethe_zeta/fixed_points.hpp"
#include "bethe_zeta/io.hpp"
#include "bethe_zeta/lbp.hpp"
#include "bethe_zeta/oracle.hpp"
#include "bethe_zeta/parallel.hpp"
#include "bethe_zeta/zeta.hpp"

namespace bethe_zeta {

/// Random connected simple graph with 2..max_n vertices and a random edge count.
inline Graph random_test_graph(std::mt19937_64& rng, int max_n, int min_degree = 0) {
  for (;;) {
    const int n = std::uniform_int_distribution<int>(std::max(2, min_degree + 1), max_n)(rng);
    const int m = std::uniform_int_distribution<int>(n - 1, n * (n - 1) / 2)(rng);
    Graph g = builtin_model("random-gnm", {n, m, 0.0, 0.0, rng()}).graph;
    bool ok = true;
    for (int i = 0; i < n; ++i) ok = ok && g.degree(i) >= min_degree;
    if (ok) return g;
  }
}

/// Uniform draw from the interior parametrization of L(G), resampled until the
/// margin reaches min_margin.
inline Pseudomarginals random_interior_point(const Graph& g, std::mt19937_64& rng, double min_margin = 1e-6) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    std::vector<double> p(static_cast<std::size_t>(g.num_vertices() + g.num_edges()));
    for (auto& v : p) v = unit(rng);
    auto q = detail::point_from_unit_cube(g, p);
    if (in_domain(g, q).margin >= min_margin) return q;
  }
}

struct VerifySummary {
  std::string suite;
  int trials = 0;
  int passed = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool ok() const { return trials > 0 && passed == trials; }
};

namespace detail {

inline std::mt19937_64 trial_rng(std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), 0x5eedu};
  return std::mt19937_64(seq);
}

/// Error of one trial, or a negative value when the trial failed outright.
inline double run_trial(const std::string& suite, std::mt19937_64& rng) {
  if (suite == "main-formula") {
    const Graph g = random_test_graph(rng, 8);
    const auto q = random_interior_point(g, rng, 1e-6);
    const auto r = verify_main_formula(g, q);
    return r.signs_agree ? std::abs(r.log_residual) : -1.0;
  }
  if (suite == "ihara") {
    const Graph g = random_test_graph(rng, 8);
    std::uniform_real_distribution<double> dist(-0.9, 0.9);
    EdgeWeights w{std::vector<double>(static_cast<std::size_t>(g.num_directed()))};
    for (int k = 0; k < g.num_edges(); ++k) {
      double a = 0.0, b = 0.0;
      do {
        a = dist(rng);
        b = dist(rng);
      } while (std::abs(1.0 - a * b) < 0.05);
      w.u[static_cast<std::size_t>(2 * k)] = a;
      w.u[static_cast<std::size_t>(2 * k + 1)] = b;
    }
    const double det = zeta_det(g, w);
    return std::abs(zeta_ihara(g, w) - det) / std::max(std::abs(det), 1e-300);
  }
  if (suite == "derivatives") {
    const Graph g = random_test_graph(rng, 6);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> j(static_cast<std::size_t>(g.num_edges())), h(static_cast<std::size_t>(g.num_vertices()));
    for (auto& v : j) v = dist(rng);
    for (auto& v : h) v = dist(rng);
    const BinaryPairwiseModel model(g, j, h);
    const auto q = random_interior_point(g, rng, 0.05);
    const Vector fd_grad =
        finite_difference_gradient(g, [&](const Pseudomarginals& p) { return free_energy(model, p); }, q);
    const Matrix fd_hess =
        finite_difference_jacobian(g, [&](const Pseudomarginals& p) { return gradient(model, p); }, q);
    // Scaled so that 1 means "at the tolerance" for either quantity.
    return std::max(relative_error(gradient(model, q), fd_grad) / 1e-6,
                    relative_error(hessian(g, q).full, fd_hess) / 1e-5);
  }
  if (suite == "similarity") {
    const Graph g = random_test_graph(rng, 7, 2);
    std::uniform_real_distribution<double> jd(-0.6, 0.6), hd(-0.5, 0.5);
    std::vector<double> j(static_cast<std::size_t>(g.num_edges())), h(static_cast<std::size_t>(g.num_vertices()));
    for (auto& v : j) v = jd(rng);
    for (auto& v : h) v = hd(rng);
    const BinaryPairwiseModel model(g, j, h);
    const auto run = lbp_run(model, MessageState::uniform(g), {0.5, 1e-13, 200000});
    if (!run.converged) return -1.0;
    const auto jac = eigenvalues(linearize_update(model, run.state));
    const auto um = weighted_nonbacktracking_spectrum(g, weights_from_pseudomarginals(g, run.beliefs).u);
    return multiset_distance(jac, um);
  }
  fail(ErrorKind::InvalidArgument, "verify", "unknown suite \"" + suite + "\"");
}

}  // namespace detail

inline const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names{"main-formula", "ihara", "derivatives", "similarity"};
  return names;
}

inline double verify_tolerance(const std::string& suite) {
  if (suite == "main-formula") return 1e-8;
  if (suite == "ihara") return 1e-10;
  if (suite == "derivatives") return 1.0;
  if (suite == "similarity") return 1e-5;
  fail(ErrorKind::InvalidArgument, "verify", "unknown suite \"" + suite + "\"");
}

/// Randomized identity checks; trial i uses a generator seeded by (seed, i).
inline VerifySummary verify_suite(const std::string& suite, int trials, std::uint64_t seed) {
  if (trials < 1) fail(ErrorKind::InvalidArgument, "verify", "trials must be positive");
  VerifySummary s;
  s.suite = suite;
  s.trials = trials;
  s.tolerance = verify_tolerance(suite);
  std::vector<double> errors(static_cast<std::size_t>(trials));
  parallel_for(errors.size(), [&](std::size_t t) {
    auto rng = detail::trial_rng(seed, static_cast<int>(t));
    errors[t] = detail::run_trial(suite, rng);
  });
  for (double e : errors) {
    if (e < 0.0) continue;
    s.max_error = std::max(s.max_error, e);
    if (e <= s.tolerance) ++s.passed;
  }
  return s;
}

}  // namespace bethe_zeta
