#pragma once

#include <cmath>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "bethe_zeta/error.hpp"
#include "bethe_zeta/graph.hpp"

namespace bethe_zeta {

/// p(x) proportional to exp(sum_ij J_ij x_i x_j + sum_i h_i x_i), x_i = +-1.
struct BinaryPairwiseModel {
  Graph graph;
  std::vector<double> coupling;  // J, one per undirected edge
  std::vector<double> field;     // h, one per vertex

  BinaryPairwiseModel() = default;
  BinaryPairwiseModel(Graph g, std::vector<double> j, std::vector<double> h)
      : graph(std::move(g)), coupling(std::move(j)), field(std::move(h)) {
    if (static_cast<int>(coupling.size()) != graph.num_edges() ||
        static_cast<int>(field.size()) != graph.num_vertices())
      fail(ErrorKind::InvalidArgument, "BinaryPairwiseModel", "parameter sizes do not match the graph");
    for (double v : coupling) {
      if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "BinaryPairwiseModel", "non-finite coupling");
    }
    for (double v : field) {
      if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "BinaryPairwiseModel", "non-finite field");
    }
  }

  int num_vertices() const { return graph.num_vertices(); }
  int num_edges() const { return graph.num_edges(); }
};

/// Zero couplings and fields on the given graph.
inline BinaryPairwiseModel zero_model(const Graph& g) {
  return {g, std::vector<double>(static_cast<std::size_t>(g.num_edges()), 0.0),
          std::vector<double>(static_cast<std::size_t>(g.num_vertices()), 0.0)};
}

/// Spin flip x_i -> s_i x_i.
struct GaugeTransform {
  std::vector<int> sign;

  static GaugeTransform identity(int n) { return {std::vector<int>(static_cast<std::size_t>(n), 1)}; }
};

inline BinaryPairwiseModel apply_gauge(const BinaryPairwiseModel& model, const GaugeTransform& s) {
  if (static_cast<int>(s.sign.size()) != model.num_vertices())
    fail(ErrorKind::InvalidArgument, "apply_gauge", "gauge size does not match vertex count");
  for (int v : s.sign) {
    if (v != 1 && v != -1) fail(ErrorKind::InvalidArgument, "apply_gauge", "gauge entries must be +-1");
  }
  BinaryPairwiseModel out = model;
  for (int k = 0; k < model.num_edges(); ++k) {
    const auto& e = model.graph.edge(k);
    out.coupling[static_cast<std::size_t>(k)] *= s.sign[static_cast<std::size_t>(e.u)] * s.sign[static_cast<std::size_t>(e.v)];
  }
  for (int i = 0; i < model.num_vertices(); ++i) out.field[static_cast<std::size_t>(i)] *= s.sign[static_cast<std::size_t>(i)];
  return out;
}

/// Gauge propagated along a spanning forest of the non-zero couplings plus
/// the first edge (if any) whose coupling stays negative under it.
struct FrustrationCheck {
  GaugeTransform gauge;
  std::optional<int> frustrated_edge;
};

inline FrustrationCheck check_frustration(const BinaryPairwiseModel& model) {
  const Graph& g = model.graph;
  FrustrationCheck out{GaugeTransform::identity(g.num_vertices()), std::nullopt};
  std::vector<bool> assigned(static_cast<std::size_t>(g.num_vertices()), false);
  // Zero couplings are satisfied by any gauge, so only non-zero edges are walked.
  for (int root = 0; root < g.num_vertices(); ++root) {
    if (assigned[static_cast<std::size_t>(root)]) continue;
    assigned[static_cast<std::size_t>(root)] = true;
    std::queue<int> frontier;
    frontier.push(root);
    while (!frontier.empty()) {
      const int i = frontier.front();
      frontier.pop();
      for (int e : g.outgoing(i)) {
        const double j_e = model.coupling[static_cast<std::size_t>(Graph::undirected(e))];
        if (j_e == 0.0) continue;
        const int t = g.terminus(e);
        if (assigned[static_cast<std::size_t>(t)]) continue;
        assigned[static_cast<std::size_t>(t)] = true;
        out.gauge.sign[static_cast<std::size_t>(t)] = out.gauge.sign[static_cast<std::size_t>(i)] * (j_e > 0 ? 1 : -1);
        frontier.push(t);
      }
    }
  }
  for (int k = 0; k < g.num_edges(); ++k) {
    const auto& e = g.edge(k);
    const double gauged = model.coupling[static_cast<std::size_t>(k)] * out.gauge.sign[static_cast<std::size_t>(e.u)] *
                          out.gauge.sign[static_cast<std::size_t>(e.v)];
    if (gauged < 0.0) {
      out.frustrated_edge = k;
      break;
    }
  }
  return out;
}

/// A gauge making every coupling non-negative, if one exists.
inline std::optional<GaugeTransform> is_equivalent_to_attractive(const BinaryPairwiseModel& model) {
  auto check = check_frustration(model);
  if (check.frustrated_edge) return std::nullopt;
  return check.gauge;
}

inline bool is_attractive(const BinaryPairwiseModel& model) {
  for (double j : model.coupling) {
    if (j < 0.0) return false;
  }
  return true;
}

/// Couplings and fields divided by the temperature t.
inline BinaryPairwiseModel temperature_scaled(const BinaryPairwiseModel& model, double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    fail(ErrorKind::NonPositiveTemperature, "temperature_scaled", "t = " + fmt(t));
  BinaryPairwiseModel out = model;
  for (auto& j : out.coupling) j /= t;
  for (auto& h : out.field) h /= t;
  return out;
}

}  // namespace bethe_zeta
