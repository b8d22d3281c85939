#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bethe_zeta/bethe.hpp"
#include "bethe_zeta/error.hpp"
#include "bethe_zeta/lbp.hpp"
#include "bethe_zeta/model.hpp"
#include "bethe_zeta/parallel.hpp"
#include "bethe_zeta/spectral.hpp"

namespace bethe_zeta {

struct EnumerationOptions {
  /// Deterministic quasi-random starts; the first is always m = 0, chi = 0.
  int lattice_points = 64;
  int n_restarts = 64;
  /// Damped LBP runs whose endpoints seed Newton (one uniform, the rest random).
  int lbp_starts = 8;
  double lbp_damping = 0.5;
  int lbp_max_iter = 2000;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  double dedup_tol = 1e-6;
  int max_size = 64;
};

struct EnumerationResult {
  std::vector<FixedPointRecord> fixed_points;
  int starts = 0;
  /// Starts whose refinement failed, by error kind.
  std::map<std::string, int> failures;
};

namespace detail {

inline std::vector<int> first_primes(std::size_t count) {
  std::vector<int> primes;
  for (int c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (int p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

inline double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return result;
}

/// Maps the unit cube onto the interior of L(G): each m_i in (-1, 1), then
/// each chi inside the interval (|m_i + m_j| - 1, 1 - |m_i - m_j|) that the
/// four edge forms allow.
inline Pseudomarginals point_from_unit_cube(const Graph& g, const std::vector<double>& p) {
  constexpr double shrink = 0.01;
  auto inner = [](double x) { return shrink + (1.0 - 2.0 * shrink) * x; };
  Pseudomarginals q = Pseudomarginals::zero(g);
  const int n = g.num_vertices();
  for (int i = 0; i < n; ++i) q.m[static_cast<std::size_t>(i)] = 2.0 * inner(p[static_cast<std::size_t>(i)]) - 1.0;
  for (int k = 0; k < g.num_edges(); ++k) {
    const double mi = q.m[static_cast<std::size_t>(g.edge(k).u)];
    const double mj = q.m[static_cast<std::size_t>(g.edge(k).v)];
    const double lo = std::abs(mi + mj) - 1.0;
    const double hi = 1.0 - std::abs(mi - mj);
    q.chi[static_cast<std::size_t>(k)] = lo + (hi - lo) * inner(p[static_cast<std::size_t>(n + k)]);
  }
  return q;
}

inline Pseudomarginals lattice_point(const Graph& g, const std::vector<int>& primes, int index) {
  std::vector<double> p(primes.size(), 0.5);
  if (index > 0) {
    for (std::size_t d = 0; d < primes.size(); ++d) p[d] = radical_inverse(static_cast<std::uint64_t>(index), primes[d]);
  }
  return point_from_unit_cube(g, p);
}

inline std::mt19937_64 start_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

inline Pseudomarginals random_point(const Graph& g, std::uint64_t seed, int index) {
  auto rng = start_rng(seed, 1, static_cast<std::uint64_t>(index));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> p(static_cast<std::size_t>(g.num_vertices() + g.num_edges()));
  for (auto& v : p) v = unit(rng);
  return point_from_unit_cube(g, p);
}

inline std::optional<Pseudomarginals> lbp_start(const BinaryPairwiseModel& model, const EnumerationOptions& opts,
                                               int index) {
  const Graph& g = model.graph;
  MessageState init = MessageState::uniform(g);
  if (index > 0) {
    double scale = 1.0;
    for (double j : model.coupling) scale = std::max(scale, 2.0 * std::abs(j));
    auto rng = start_rng(opts.seed, 2, static_cast<std::uint64_t>(index));
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (Eigen::Index e = 0; e < init.log_eta.size(); ++e) init.log_eta(e) = dist(rng);
  }
  const auto run = lbp_run(model, init, {opts.lbp_damping, opts.tol, opts.lbp_max_iter});
  if (in_domain(g, run.beliefs).margin < kDomainFloor) return std::nullopt;
  return run.beliefs;
}

inline double point_distance(const Pseudomarginals& a, const Pseudomarginals& b) {
  double dm = 0.0, dc = 0.0;
  for (std::size_t i = 0; i < a.m.size(); ++i) dm = std::max(dm, std::abs(a.m[i] - b.m[i]));
  for (std::size_t k = 0; k < a.chi.size(); ++k) dc = std::max(dc, std::abs(a.chi[k] - b.chi[k]));
  return dm + dc;
}

}  // namespace detail

/// Multi-start Newton search for the stationary points of F (equivalently the
/// LBP fixed points). Starts run concurrently; the merged list is sorted and
/// deduplicated so the outcome does not depend on scheduling.
inline EnumerationResult enumerate_fixed_points(const BinaryPairwiseModel& model, const EnumerationOptions& opts = {}) {
  const char* op = "enumerate_fixed_points";
  const Graph& g = model.graph;
  if (g.num_vertices() + g.num_edges() > opts.max_size)
    fail(ErrorKind::TooLarge, op, "N + M exceeds the configured cap of " + std::to_string(opts.max_size));
  if (opts.lattice_points < 1 || opts.n_restarts < 0 || opts.lbp_starts < 0)
    fail(ErrorKind::InvalidArgument, op, "start counts must be non-negative with at least one lattice point");

  const auto primes = detail::first_primes(static_cast<std::size_t>(g.num_vertices() + g.num_edges()));
  const int total = opts.lattice_points + opts.n_restarts + opts.lbp_starts;
  std::vector<std::optional<Pseudomarginals>> found(static_cast<std::size_t>(total));
  std::vector<std::string> failure(static_cast<std::size_t>(total));

  parallel_for(static_cast<std::size_t>(total), [&](std::size_t slot) {
    const int s = static_cast<int>(slot);
    try {
      std::optional<Pseudomarginals> start;
      if (s < opts.lattice_points) {
        start = detail::lattice_point(g, primes, s);
      } else if (s < opts.lattice_points + opts.n_restarts) {
        start = detail::random_point(g, opts.seed, s - opts.lattice_points);
      } else {
        start = detail::lbp_start(model, opts, s - opts.lattice_points - opts.n_restarts);
        if (!start) {
          failure[slot] = "LbpLeftInterior";
          return;
        }
      }
      found[slot] = refine_fixed_point(model, *start, {opts.tol, 200});
    } catch (const Error& e) {
      failure[slot] = std::string(to_string(e.kind()));
    }
  });

  EnumerationResult out;
  out.starts = total;
  std::vector<Pseudomarginals> points;
  for (int s = 0; s < total; ++s) {
    if (found[static_cast<std::size_t>(s)]) {
      points.push_back(*found[static_cast<std::size_t>(s)]);
    } else {
      ++out.failures[failure[static_cast<std::size_t>(s)]];
    }
  }
  std::sort(points.begin(), points.end(), [](const Pseudomarginals& a, const Pseudomarginals& b) {
    if (a.m != b.m) return a.m < b.m;
    return a.chi < b.chi;
  });
  std::vector<Pseudomarginals> unique;
  for (const auto& p : points) {
    const bool seen = std::any_of(unique.begin(), unique.end(),
                                  [&](const Pseudomarginals& u) { return detail::point_distance(u, p) < opts.dedup_tol; });
    if (!seen) unique.push_back(p);
  }
  for (const auto& p : unique) out.fixed_points.push_back(classify_stability(model, p));
  return out;
}

enum class IndexSumStatus { Passed, DegenerateFixedPoint, PossiblyIncompleteEnumeration };

inline std::string_view to_string(IndexSumStatus s) {
  switch (s) {
    case IndexSumStatus::Passed: return "Passed";
    case IndexSumStatus::DegenerateFixedPoint: return "DegenerateFixedPoint";
    case IndexSumStatus::PossiblyIncompleteEnumeration: return "PossiblyIncompleteEnumeration";
  }
  return "?";
}

struct IndexSumReport {
  int sum = 0;
  int count = 0;
  bool passed = false;
  bool retried = false;
  IndexSumStatus status = IndexSumStatus::PossiblyIncompleteEnumeration;
  EnumerationResult enumeration;
};

/// Sums sign(det Hessian) over the enumerated stationary points. A sum other
/// than 1 means the search missed points; one denser search is attempted
/// before reporting PossiblyIncompleteEnumeration.
inline IndexSumReport index_sum_check(const BinaryPairwiseModel& model, const EnumerationOptions& opts = {}) {
  auto evaluate = [&](const EnumerationOptions& o, bool retried) {
    IndexSumReport r;
    r.retried = retried;
    r.enumeration = enumerate_fixed_points(model, o);
    r.count = static_cast<int>(r.enumeration.fixed_points.size());
    bool degenerate = false;
    for (const auto& fp : r.enumeration.fixed_points) {
      r.sum += fp.index;
      degenerate = degenerate || fp.degenerate();
    }
    if (degenerate) {
      r.status = IndexSumStatus::DegenerateFixedPoint;
    } else if (r.sum == 1 && r.count % 2 == 1) {
      r.status = IndexSumStatus::Passed;
    } else {
      r.status = IndexSumStatus::PossiblyIncompleteEnumeration;
    }
    r.passed = r.status == IndexSumStatus::Passed;
    return r;
  };
  auto report = evaluate(opts, false);
  if (report.status == IndexSumStatus::PossiblyIncompleteEnumeration) {
    EnumerationOptions denser = opts;
    denser.lattice_points *= 4;
    denser.n_restarts *= 4;
    denser.lbp_starts *= 4;
    denser.seed = opts.seed + 1;
    report = evaluate(denser, true);
  }
  return report;
}

}  // namespace bethe_zeta
