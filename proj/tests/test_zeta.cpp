#include <gtest/gtest.h>

#include <random>

#include "bethe_zeta.hpp"

using namespace bethe_zeta;

namespace {

EdgeWeights random_weights(const Graph& g, std::mt19937_64& rng, double bound) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  EdgeWeights w{std::vector<double>(static_cast<std::size_t>(g.num_directed()))};
  for (auto& v : w.u) v = dist(rng);
  return w;
}

Pseudomarginals symmetric_point(const Graph& g, double t) {
  return {std::vector<double>(static_cast<std::size_t>(g.num_vertices()), 0.0),
          std::vector<double>(static_cast<std::size_t>(g.num_edges()), t)};
}

}  // namespace

TEST(Weights, SymmetricPointGivesConstantWeight) {
  const Graph g = builtin_model("k4").graph;
  for (double u : weights_from_pseudomarginals(g, symmetric_point(g, 0.37)).u) EXPECT_DOUBLE_EQ(u, 0.37);
}

TEST(Weights, IndependencePointGivesZero) {
  const Graph g = build_graph(2, {{0, 1}});
  const auto w = weights_from_pseudomarginals(g, {{0.4, -0.3}, {-0.12}});
  EXPECT_NEAR(w.u[0], 0.0, 1e-16);
  EXPECT_NEAR(w.u[1], 0.0, 1e-16);
}

TEST(Weights, VarianceIsTakenAtTheTerminus) {
  const Graph g = build_graph(2, {{0, 1}});
  const auto w = weights_from_pseudomarginals(g, {{0.6, 0.0}, {0.3}});
  EXPECT_DOUBLE_EQ(w.u[0], 0.3);      // 0 -> 1
  EXPECT_DOUBLE_EQ(w.u[1], 0.46875);  // 1 -> 0
}

TEST(Weights, ProductOfOrientationsIsBetaSquared) {
  std::mt19937_64 rng(1);
  const Graph g = builtin_model("example2").graph;
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = random_interior_point(g, rng, 1e-4);
    const auto w = weights_from_pseudomarginals(g, q);
    const auto beta = beta_weights(g, q);
    for (int k = 0; k < g.num_edges(); ++k) {
      const double b = beta[static_cast<std::size_t>(k)];
      EXPECT_LT(std::abs(b), 1.0);
      EXPECT_NEAR(w.u[static_cast<std::size_t>(2 * k)] * w.u[static_cast<std::size_t>(2 * k + 1)], b * b, 1e-12);
    }
  }
}

TEST(Weights, BetaEqualsChiAtZeroMeans) {
  const Graph g = builtin_model("cycle", {5}).graph;
  Pseudomarginals q = symmetric_point(g, 0.0);
  q.chi = {0.1, -0.2, 0.3, -0.4, 0.5};
  EXPECT_EQ(beta_weights(g, q), q.chi);
}

TEST(Weights, SymmetrizationPreservesSpectrum) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = random_test_graph(rng, 7);
    const auto q = random_interior_point(g, rng, 1e-3);
    const auto um = weighted_nonbacktracking_spectrum(g, weights_from_pseudomarginals(g, q).u);
    const auto bm = weighted_nonbacktracking_spectrum(g, directed_from_undirected(g, beta_weights(g, q)).u);
    EXPECT_LE(multiset_distance(um, bm), 1e-8);
  }
}

TEST(DetForm, TreeIsOne) {
  std::mt19937_64 rng(3);
  const Graph g = builtin_model("random-gnm", {8, 7, 1.0, 0.0, 3}).graph;
  EXPECT_NEAR(zeta_det(g, random_weights(g, rng, 2.0)), 1.0, 1e-12);
}

TEST(DetForm, CycleIsSquaredOneMinusProduct) {
  for (int n = 3; n <= 7; ++n) {
    const Graph g = builtin_model("cycle", {n}).graph;
    const double u = 0.3;
    const double expected = std::pow(1.0 - std::pow(u, n), 2);
    EXPECT_NEAR(zeta_det(g, EdgeWeights::constant(g, u)), expected, 1e-14);
  }
}

TEST(DetForm, CycleWithDistinctWeightsFactorsByOrientation) {
  std::mt19937_64 rng(4);
  const Graph g = builtin_model("cycle", {6}).graph;
  const auto w = random_weights(g, rng, 0.95);
  double forward = 1.0, backward = 1.0;
  for (int k = 0; k < g.num_edges(); ++k) {
    forward *= w.u[static_cast<std::size_t>(2 * k)];
    backward *= w.u[static_cast<std::size_t>(2 * k + 1)];
  }
  EXPECT_NEAR(zeta_det(g, w), (1.0 - forward) * (1.0 - backward), 1e-13);
}

TEST(DetForm, ThetaGraphFactorization) {
  const Graph g = builtin_model("theta").graph;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-0.99, 0.99);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> b{dist(rng), dist(rng), dist(rng)};
    const double pairs = b[0] * b[1] + b[1] * b[2] + b[0] * b[2];
    const double triple = 2.0 * b[0] * b[1] * b[2];
    const double expected = (1.0 - pairs - triple) * (1.0 - pairs + triple);
    EXPECT_NEAR(zeta_det(g, directed_from_undirected(g, b)), expected, 1e-12);
  }
}

TEST(DetForm, LogFormAgreesWithRawForm) {
  std::mt19937_64 rng(6);
  const Graph g = builtin_model("k4").graph;
  const auto w = random_weights(g, rng, 0.9);
  const auto lg = zeta_det_log(g, w);
  EXPECT_NEAR(lg.value(), zeta_det(g, w), 1e-12 * std::abs(zeta_det(g, w)));
}

TEST(Ihara, AgreesWithDeterminant) {
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    auto trial_rng = detail::trial_rng(7, trial);
    worst = std::max(worst, detail::run_trial("ihara", trial_rng));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(Ihara, ReducesToClassicalForm) {
  for (const char* name : {"k4", "example2", "cycle", "barbell"}) {
    const Graph g = builtin_model(name, {5}).graph;
    for (double u : {-0.7, -0.2, 0.1, 0.45, 0.8}) {
      const double multi = zeta_ihara(g, EdgeWeights::constant(g, u));
      EXPECT_NEAR(multi, ihara_classical(g, u), 1e-12 * std::max(1.0, std::abs(multi))) << name << " u=" << u;
      EXPECT_NEAR(multi, zeta_det(g, EdgeWeights::constant(g, u)), 1e-10 * std::max(1.0, std::abs(multi)));
    }
  }
}

TEST(Ihara, ZeroWeightsGiveOne) {
  const Graph g = builtin_model("example2").graph;
  EXPECT_EQ(zeta_ihara(g, EdgeWeights::constant(g, 0.0)), 1.0);
}

TEST(Ihara, RefusesSingularPair) {
  const Graph g = builtin_model("k4").graph;
  auto w = EdgeWeights::constant(g, 0.2);
  w.u[0] = 2.0;
  w.u[1] = 0.5;
  try {
    zeta_ihara(g, w);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularPair);
  }
  const auto report = zeta_report(g, w);
  EXPECT_FALSE(report.ihara_form.has_value());
}

TEST(Ihara, EdgePairBlockDeterminant) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = random_test_graph(rng, 7);
    const auto w = random_weights(g, rng, 1.5);
    double product = 1.0;
    for (int k = 0; k < g.num_edges(); ++k)
      product *= 1.0 - w.u[static_cast<std::size_t>(2 * k)] * w.u[static_cast<std::size_t>(2 * k + 1)];
    EXPECT_NEAR(edge_pair_determinant(g, w), product, 1e-12 * std::max(1.0, std::abs(product)));
  }
}

TEST(Product, TreeIsExactlyOne) {
  const Graph g = builtin_model("path", {6}).graph;
  const auto p = zeta_product_truncated(g, EdgeWeights::constant(g, 0.9), 10);
  EXPECT_EQ(p.value, 1.0);
  EXPECT_EQ(p.bound, 0.0);
  EXPECT_EQ(p.num_cycles, 0u);
}

TEST(Product, CycleMatchesClosedForm) {
  for (int n = 3; n <= 8; ++n) {
    const Graph g = builtin_model("cycle", {n}).graph;
    for (int len : {n, 2 * n + 1}) {
      const auto p = zeta_product_truncated(g, EdgeWeights::constant(g, 0.3), len);
      EXPECT_NEAR(p.value, std::pow(1.0 - std::pow(0.3, n), 2), 1e-12);
      EXPECT_EQ(p.num_cycles, 2u);
    }
  }
}

TEST(Product, CompleteGraphWithinTailBound) {
  const Graph g = builtin_model("k4").graph;
  const auto w = EdgeWeights::constant(g, 0.1);
  const double det = zeta_det(g, w);
  double previous = std::numeric_limits<double>::infinity();
  for (int len : {4, 8, 12}) {
    const auto p = zeta_product_truncated(g, w, len);
    const double err = std::abs(p.value - det);
    EXPECT_LE(err, p.bound) << "len " << len;
    EXPECT_LE(err, previous);
    previous = err;
  }
}

TEST(Product, RandomWeightsWithinTailBound) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = random_test_graph(rng, 6);
    const double alpha = perron_eigenvalue(g);
    const auto w = random_weights(g, rng, alpha > 0 ? 0.5 / alpha : 0.5);
    const auto p = zeta_product_truncated(g, w, 10);
    EXPECT_LE(std::abs(p.value - zeta_det(g, w)), p.bound + 1e-14) << "trial " << trial;
  }
}

TEST(Product, RefusesDivergentWeights) {
  const Graph g = builtin_model("k4").graph;
  EXPECT_THROW(zeta_product_truncated(g, EdgeWeights::constant(g, 0.6), 6), Error);
}

TEST(Product, InvariantUnderReduction) {
  std::mt19937_64 rng(10);
  const Graph g = builtin_model("example2").graph;
  const auto w = random_weights(g, rng, 0.4);
  const auto r = reduce_preserving_prime_cycles(g, w.u);
  EXPECT_NEAR(zeta_det(r.graph, {r.weights}), zeta_det(g, w), 1e-13);
}

TEST(MainFormula, HoldsAtRandomPoints) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = random_test_graph(rng, 8);
    const auto q = random_interior_point(g, rng, 1e-6);
    const auto r = verify_main_formula(g, q);
    EXPECT_TRUE(r.signs_agree) << "trial " << trial;
    EXPECT_LE(std::abs(r.log_residual), 1e-8) << "trial " << trial;
  }
}

TEST(MainFormula, OriginBothSidesAreOne) {
  const Graph g = builtin_model("example2").graph;
  const auto r = verify_main_formula(g, Pseudomarginals::zero(g));
  EXPECT_EQ(r.lhs.sign, 1);
  EXPECT_NEAR(r.lhs.log_abs, 0.0, 1e-15);
  EXPECT_EQ(r.rhs.sign, 1);
  EXPECT_NEAR(r.rhs.log_abs, 0.0, 1e-12);
}

TEST(MainFormula, TreeHessianDeterminantIsPositive) {
  std::mt19937_64 rng(12);
  const Graph g = builtin_model("random-gnm", {6, 5, 1.0, 0.0, 12}).graph;
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = random_interior_point(g, rng, 1e-4);
    const auto r = verify_main_formula(g, q);
    EXPECT_EQ(r.lhs.sign, 1);
    EXPECT_NEAR(r.lhs.log_abs, 0.0, 1e-12);
    EXPECT_EQ(signed_log_det(hessian(g, q).full).sign, 1);
  }
}

TEST(MainFormula, RefusesPointsNearTheBoundary) {
  const Graph g = build_graph(2, {{0, 1}});
  EXPECT_THROW(verify_main_formula(g, {{0.0, 0.0}, {1.0 - 1e-8}}), Error);
}

TEST(Hashimoto, CompleteGraphOnFourVertices) {
  const auto r = hashimoto_limit_check(builtin_model("k4").graph);
  EXPECT_DOUBLE_EQ(r.predicted, -0.0625);
  EXPECT_LE(r.rel_error(), 1e-3);
}

TEST(Hashimoto, TwoCycleExample) {
  const Graph g = builtin_model("example2").graph;
  const auto r = hashimoto_limit_check(g);
  EXPECT_DOUBLE_EQ(r.predicted, -std::pow(2.0, -8) * 8.0);
  EXPECT_LE(r.rel_error(), 1e-3);
}

TEST(Hashimoto, CycleLimitIsZero) {
  const auto r = hashimoto_limit_check(builtin_model("cycle", {5}).graph);
  EXPECT_EQ(r.predicted, 0.0);
  EXPECT_LE(r.abs_error(), 1e-6);
}

TEST(Hashimoto, RequiresAtLeastOneCycle) {
  EXPECT_THROW(hashimoto_limit_check(builtin_model("path", {4}).graph), Error);
}
