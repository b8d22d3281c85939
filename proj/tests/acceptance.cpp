// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bethe_zeta.hpp"

using namespace bethe_zeta;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Pseudomarginals symmetric_point(const Graph& g, double t) {
  return {std::vector<double>(static_cast<std::size_t>(g.num_vertices()), 0.0),
          std::vector<double>(static_cast<std::size_t>(g.num_edges()), t)};
}

Outcome from_suite(const std::string& suite, int trials) {
  const auto start = std::chrono::steady_clock::now();
  const auto s = verify_suite(suite, trials, 0);
  const double elapsed = seconds_since(start);
  return {s.ok(), std::to_string(s.passed) + "/" + std::to_string(s.trials) + " trials, max error " + sci(s.max_error) +
                      " (tolerance " + sci(s.tolerance) + "), " + sci(elapsed) + " s"};
}

Outcome main_formula() {
  const auto start = std::chrono::steady_clock::now();
  auto out = from_suite("main-formula", 200);
  if (seconds_since(start) >= 10.0) out.pass = false;
  return out;
}

Outcome ihara() { return from_suite("ihara", 200); }

Outcome prime_cycle_product() {
  Outcome out;
  int trees = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = builtin_model("random-gnm", {7, 6, 1.0, 0.0, seed}).graph;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.9, 0.9);
    EdgeWeights w{std::vector<double>(static_cast<std::size_t>(g.num_directed()))};
    for (auto& v : w.u) v = dist(rng);
    const auto p = zeta_product_truncated(g, w, 12);
    if (p.value == 1.0) ++trees;
  }
  out.pass = trees == 5;
  double cycle_err = 0.0;
  for (int n = 3; n <= 8; ++n) {
    const Graph g = builtin_model("cycle", {n}).graph;
    for (int len : {n, 2 * n}) {
      const auto p = zeta_product_truncated(g, EdgeWeights::constant(g, 0.3), len);
      cycle_err = std::max(cycle_err, std::abs(p.value - std::pow(1.0 - std::pow(0.3, n), 2)));
    }
  }
  out.pass = out.pass && cycle_err <= 1e-12;
  const Graph k4 = builtin_model("k4").graph;
  const auto w = EdgeWeights::constant(k4, 0.1);
  const auto p = zeta_product_truncated(k4, w, 12);
  const double k4_err = std::abs(p.value - zeta_det(k4, w));
  out.pass = out.pass && k4_err <= p.bound;
  out.detail = "trees exact " + std::to_string(trees) + "/5, cycles max error " + sci(cycle_err) + ", K4 error " +
               sci(k4_err) + " within bound " + sci(p.bound);
  return out;
}

Outcome derivatives() {
  const auto s = verify_suite("derivatives", 50, 0);
  return {s.ok(), std::to_string(s.passed) + "/" + std::to_string(s.trials) +
                      " points, worst error as a fraction of its tolerance (gradient 1e-6, Hessian 1e-5) " +
                      sci(s.max_error)};
}

Outcome similarity() { return from_suite("similarity", 25); }

Outcome convexity_boundary() {
  Outcome out;
  std::vector<Graph> convex{builtin_model("path", {2}).graph, builtin_model("path", {6}).graph,
                            builtin_model("cycle", {3}).graph, builtin_model("cycle", {4}).graph,
                            builtin_model("cycle", {7}).graph};
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    convex.push_back(builtin_model("random-gnm", {7, 6, 1.0, 0.0, seed}).graph);
    convex.push_back(builtin_model("random-gnm", {7, 7, 1.0, 0.0, seed}).graph);
  }
  std::mt19937_64 rng(6);
  int pd = 0, sampled = 0;
  for (const auto& g : convex) {
    for (int s = 0; s < 100; ++s) {
      ++sampled;
      if (min_symmetric_eigenvalue(hessian(g, random_interior_point(g, rng, 1e-6)).full) > 0.0) ++pd;
    }
  }
  std::vector<Graph> loopy{builtin_model("k4").graph, builtin_model("example2").graph, builtin_model("theta").graph};
  for (std::uint64_t seed = 0; seed < 3; ++seed) loopy.push_back(builtin_model("random-gnm", {7, 9, 1.0, 0.0, seed}).graph);
  int indefinite = 0;
  for (const auto& g : loopy) {
    if (min_symmetric_eigenvalue(hessian(g, symmetric_point(g, 0.999)).full) < 0.0) ++indefinite;
  }
  out.pass = pd == sampled && indefinite == static_cast<int>(loopy.size());
  out.detail = "positive definite at " + std::to_string(pd) + "/" + std::to_string(sampled) +
               " points on trees and one-cycle graphs; negative eigenvalue at chi = 0.999 on " +
               std::to_string(indefinite) + "/" + std::to_string(loopy.size()) + " graphs with M - N >= 1";
  return out;
}

Outcome hashimoto() {
  Outcome out;
  for (const char* name : {"k4", "example2"}) {
    const auto r = hashimoto_limit_check(builtin_model(name).graph);
    out.pass = out.pass && r.rel_error() <= 1e-3;
    out.detail += std::string(out.detail.empty() ? "" : "; ") + name + " limit " + sci(r.extrapolated) + " vs " +
                  sci(r.predicted) + " (relative error " + sci(r.rel_error()) + ")";
  }
  return out;
}

struct BatteryEntry {
  std::string name;
  BinaryPairwiseModel model;
  IndexSumReport report;
};

std::vector<BatteryEntry>& battery() {
  static std::vector<BatteryEntry> entries = [] {
    std::vector<std::pair<std::string, BinaryPairwiseModel>> models{
        {"path J=2", builtin_model("path", {5, 0, 2.0, 0.3})},
        {"random tree", builtin_model("random-gnm", {7, 6, 2.0, 1.0, 1})},
        {"C3 weak", builtin_model("cycle", {3, 0, 0.3, 0.1})},
        {"C3 strong", builtin_model("cycle", {3, 0, 2.0, 0.0})},
        {"C4 weak", builtin_model("cycle", {4, 0, 0.3, 0.1})},
        {"C4 strong", builtin_model("cycle", {4, 0, 1.5, 0.0})},
        {"C4 strong repulsive", builtin_model("cycle", {4, 0, -1.5, 0.2})},
        {"example2 J=0.5", builtin_model("example2", {4, 0, 0.5, 0.1})},
        {"example2 J=3", builtin_model("example2", {4, 0, 3.0, 0.0})},
        {"K4 J=1", builtin_model("k4", {4, 0, 1.0, 0.0})},
        {"K4 J=1 h=0.05", builtin_model("k4", {4, 0, 1.0, 0.05})},
    };
    std::vector<BatteryEntry> out;
    for (auto& [name, model] : models) {
      auto report = index_sum_check(model);
      out.push_back({name, model, std::move(report)});
    }
    return out;
  }();
  return entries;
}

std::string indices_of(const IndexSumReport& r) {
  std::vector<int> idx;
  for (const auto& fp : r.enumeration.fixed_points) idx.push_back(fp.index);
  std::sort(idx.rbegin(), idx.rend());
  std::string s = "(";
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + std::string(idx[i] > 0 ? "+1" : "-1");
  return s + ")";
}

Outcome index_sum() {
  Outcome out;
  int passed = 0;
  std::string failures;
  for (const auto& e : battery()) {
    if (e.report.passed) {
      ++passed;
    } else {
      failures += " " + e.name + ":" + std::string(to_string(e.report.status));
    }
  }
  out.pass = passed == static_cast<int>(battery().size());
  out.detail = std::to_string(passed) + "/" + std::to_string(battery().size()) + " models with sum 1 and odd count";
  if (!failures.empty()) out.detail += " [failed:" + failures + "]";

  // Three fixed points with indices (+1,+1,-1) on the strong attractive four-cycle.
  const auto& c4 = battery()[5];
  const bool three = c4.report.count == 3 && indices_of(c4.report) == "(+1,+1,-1)";
  out.pass = out.pass && three;
  out.detail += "; strong attractive C4 (J=1.5, h=0): " + std::to_string(c4.report.count) + " fixed point(s) " +
                indices_of(c4.report) + (three ? "" : ", expected 3 with (+1,+1,-1)");
  const auto& k4 = battery()[9];
  out.detail += "; K4 (J=1, h=0): " + std::to_string(k4.report.count) + " fixed points " + indices_of(k4.report);
  return out;
}

Outcome uniqueness() {
  struct Case {
    std::string name;
    BinaryPairwiseModel model;
    double tol;
  };
  // A frustrated two-cycle graph other than the example: a square with one
  // diagonal and a single repulsive side.
  auto square = [](double j, double h) {
    BinaryPairwiseModel m(build_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}}), {-j, j, j, j, j},
                          {h, -h, h, 0.0});
    return m;
  };
  std::vector<Case> cases{
      {"K4 J=0.4", builtin_model("k4", {4, 0, 0.4, 0.3}), 1e-10},
      {"random weak", builtin_model("random-gnm", {6, 10, 0.35, 0.5, 7}), 1e-10},
      {"example2 J=1", builtin_model("example2", {4, 0, 1.0, 0.2}), 1e-10},
      {"example2 J=5", builtin_model("example2", {4, 0, 5.0, 0.0}), 1e-10},
      {"example2 J=10", builtin_model("example2", {4, 0, 10.0, 0.0}), 1e-7},
      {"example2 J=-10", builtin_model("example2", {4, 0, -10.0, 0.5}), 1e-7},
      {"square J=10", square(10.0, 0.3), 1e-7},
  };
  Outcome out;
  std::string detail;
  int unique = 0, certified = 0;
  for (const auto& c : cases) {
    const auto cert = uniqueness_certificate(c.model);
    if (cert.kind == CertificateKind::None) {
      out.pass = false;
      detail += " " + c.name + ":no certificate";
      continue;
    }
    ++certified;
    EnumerationOptions opts;
    opts.n_restarts = 1000;
    opts.tol = c.tol;
    const auto r = enumerate_fixed_points(c.model, opts);
    const auto n = r.fixed_points.size();
    if (n == 1) {
      ++unique;
    } else {
      out.pass = false;
    }
    detail += " " + c.name + ":" + std::string(to_string(cert.kind)) + "=" + std::to_string(n);
  }
  out.detail = std::to_string(unique) + "/" + std::to_string(cases.size()) + " certified models (" +
               std::to_string(certified) + " certified) have exactly one fixed point over >= 1000 restarts;" + detail;
  return out;
}

Outcome two_cycle_patterns() {
  auto grid = [](double lo, double hi) {
    std::vector<double> v;
    for (int i = 0; i < 20; ++i) v.push_back(lo + (hi - lo) * i / 20.0);
    return v;
  };
  const auto pos = grid(0.0, 1.0), neg = grid(0.0, -1.0);
  double min_det = std::numeric_limits<double>::infinity(), worst = 0.0;
  long points = 0;
  auto sweep = [&](const Graph& g, const std::vector<std::vector<double>>& axes,
                   const std::function<double(const std::vector<double>&)>& form) {
    std::vector<std::size_t> idx(axes.size(), 0);
    for (;;) {
      std::vector<double> beta;
      for (std::size_t a = 0; a < axes.size(); ++a) beta.push_back(axes[a][idx[a]]);
      const double det = zeta_det(g, directed_from_undirected(g, beta));
      min_det = std::min(min_det, det);
      worst = std::max(worst, std::abs(det - form(beta)));
      ++points;
      std::size_t a = 0;
      while (a < axes.size() && ++idx[a] == axes[a].size()) idx[a++] = 0;
      if (a == axes.size()) break;
    }
  };
  auto theta_form = [](const std::vector<double>& b) {
    const double pairs = b[0] * b[1] + b[1] * b[2] + b[0] * b[2];
    const double triple = 2.0 * b[0] * b[1] * b[2];
    return (1.0 - pairs - triple) * (1.0 - pairs + triple);
  };
  auto barbell_form = [](const std::vector<double>& b) {
    return (1.0 - b[0]) * (1.0 - b[2]) * (1.0 - b[0] - b[2] + b[0] * b[2] - 4.0 * b[0] * b[1] * b[1] * b[2]);
  };
  auto loops_form = [](const std::vector<double>& b) {
    return (1.0 - b[0]) * (1.0 - b[1]) * (1.0 - b[0] - b[1] - 3.0 * b[0] * b[1]);
  };
  const Graph theta = builtin_model("theta").graph;
  const Graph barbell = builtin_model("barbell").graph;
  const Graph eight = builtin_model("type4-loops").graph;
  sweep(theta, {neg, pos, pos}, theta_form);
  sweep(barbell, {pos, pos, neg}, barbell_form);
  sweep(barbell, {neg, pos, neg}, barbell_form);
  sweep(eight, {pos, neg}, loops_form);
  sweep(eight, {neg, neg}, loops_form);
  return {min_det > 0.0 && worst <= 1e-12, std::to_string(points) + " grid points over 5 sign patterns, min det " +
                                               sci(min_det) + ", max deviation from factorization " + sci(worst)};
}

Outcome beta_bounds() {
  Outcome out;
  int points = 0, ok = 0;
  for (const auto& e : battery()) {
    for (const auto& fp : e.report.enumeration.fixed_points) {
      ++points;
      if (beta_bound_check(e.model, fp.q).all_pass) ++ok;
    }
  }
  // Equality at h = 0 symmetric points.
  double worst_gap = 0.0;
  int symmetric = 0;
  for (const auto& e : battery()) {
    bool zero_field = true;
    for (double h : e.model.field) zero_field = zero_field && h == 0.0;
    if (!zero_field) continue;
    for (const auto& fp : e.report.enumeration.fixed_points) {
      bool centred = true;
      for (double m : fp.q.m) centred = centred && std::abs(m) < 1e-9;
      if (!centred) continue;
      ++symmetric;
      for (const auto& edge : beta_bound_check(e.model, fp.q).edges)
        worst_gap = std::max(worst_gap, std::abs(std::abs(edge.beta) - edge.bound));
    }
  }
  out.pass = ok == points && symmetric > 0 && worst_gap <= 1e-9;
  out.detail = "bound and sign hold at " + std::to_string(ok) + "/" + std::to_string(points) +
               " fixed points; equality gap " + sci(worst_gap) + " at " + std::to_string(symmetric) +
               " symmetric h=0 points";
  return out;
}

Outcome crossing() {
  SweepOptions opts;
  opts.t_start = 3.0;
  opts.t_end = 1.0;
  const auto r = saddle_crossing_track(builtin_model("k4", {4, 0, 1.0, 0.0}), opts);
  Outcome out;
  out.pass = r.coincide && r.eigen_crossings.size() == 1 && r.det_crossings.size() == 1;
  std::ostringstream d;
  d << "K4 (J=1, h=0), t from 3 to 1: " << r.eigen_crossings.size() << " eigenvalue / " << r.det_crossings.size()
    << " determinant crossing(s)";
  if (out.pass) {
    const auto& a = r.eigen_crossings[0];
    const auto& b = r.det_crossings[0];
    out.pass = a.width() <= 1e-5 && b.width() <= 1e-5;
    d.precision(8);
    d << " at t = " << a.mid() << " and " << b.mid() << " (width " << sci(std::max(a.width(), b.width()))
      << "), closed form " << 1.0 / std::atanh(0.5);
  }
  out.detail = d.str();
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"main formula", main_formula},
      {"multivariable Ihara", ihara},
      {"prime-cycle product", prime_cycle_product},
      {"derivatives", derivatives},
      {"LBP Jacobian similarity", similarity},
      {"convexity boundary", convexity_boundary},
      {"Hashimoto limit", hashimoto},
      {"index sum", index_sum},
      {"uniqueness certificates", uniqueness},
      {"two-cycle determinant positivity", two_cycle_patterns},
      {"correlation bounds", beta_bounds},
      {"saddle crossing", crossing},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("AC%zu %s %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
