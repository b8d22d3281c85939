#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "bethe_zeta/error.hpp"
#include "bethe_zeta/graph.hpp"

namespace bethe_zeta {

/// Result of pruning pendant trees and suppressing degree-two vertices.
/// The reduced multigraph has the same prime cycles as the input, with each
/// reduced directed edge standing for a path of original directed edges.
struct Reduction {
  Graph graph;
  /// Weight per reduced directed edge: product of the weights along its path.
  std::vector<double> weights;
  /// Original directed edges traversed by reduced directed edge 2k, in order.
  /// Edge 2k+1 traverses the inverses in reverse order.
  std::vector<std::vector<int>> paths;
  /// Original vertex for each reduced vertex.
  std::vector<int> vertex_map;

  /// True when the input was a tree (no edges survive).
  bool empty() const { return graph.num_edges() == 0; }
};

inline Reduction reduce_preserving_prime_cycles(const Graph& g, const std::vector<double>& weights) {
  if (static_cast<int>(weights.size()) != g.num_directed())
    fail(ErrorKind::InvalidArgument, "reduce_preserving_prime_cycles", "need one weight per directed edge");

  struct Chain {
    int a, b;
    std::vector<int> path;  // original directed edges from a to b
    double forward, backward;
    bool alive = true;
  };
  std::vector<Chain> chains;
  chains.reserve(static_cast<std::size_t>(g.num_edges()));
  for (int k = 0; k < g.num_edges(); ++k) {
    chains.push_back({g.edge(k).u, g.edge(k).v, {2 * k}, weights[static_cast<std::size_t>(2 * k)],
                      weights[static_cast<std::size_t>(2 * k + 1)]});
  }
  std::vector<bool> vertex_alive(static_cast<std::size_t>(g.num_vertices()), true);

  auto reversed = [](const Chain& c) {
    Chain r = c;
    std::swap(r.a, r.b);
    std::swap(r.forward, r.backward);
    r.path.clear();
    for (auto it = c.path.rbegin(); it != c.path.rend(); ++it) r.path.push_back(Graph::inverse(*it));
    return r;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::vector<std::size_t>> incident(static_cast<std::size_t>(g.num_vertices()));
    for (std::size_t c = 0; c < chains.size(); ++c) {
      if (!chains[c].alive) continue;
      incident[static_cast<std::size_t>(chains[c].a)].push_back(c);
      incident[static_cast<std::size_t>(chains[c].b)].push_back(c);
    }
    for (int v = 0; v < g.num_vertices() && !changed; ++v) {
      const auto& inc = incident[static_cast<std::size_t>(v)];
      if (!vertex_alive[static_cast<std::size_t>(v)]) continue;
      if (inc.size() == 1) {
        chains[inc[0]].alive = false;
        vertex_alive[static_cast<std::size_t>(v)] = false;
        changed = true;
      } else if (inc.size() == 2 && inc[0] != inc[1]) {
        Chain first = chains[inc[0]];
        Chain second = chains[inc[1]];
        if (first.b != v) first = reversed(first);
        if (second.a != v) second = reversed(second);
        Chain merged{first.a, second.b, first.path, first.forward * second.forward,
                     first.backward * second.backward};
        merged.path.insert(merged.path.end(), second.path.begin(), second.path.end());
        chains[inc[0]] = std::move(merged);
        chains[inc[1]].alive = false;
        vertex_alive[static_cast<std::size_t>(v)] = false;
        changed = true;
      }
    }
  }

  Reduction out;
  std::vector<int> relabel(static_cast<std::size_t>(g.num_vertices()), -1);
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (vertex_alive[static_cast<std::size_t>(v)]) {
      relabel[static_cast<std::size_t>(v)] = static_cast<int>(out.vertex_map.size());
      out.vertex_map.push_back(v);
    }
  }
  std::vector<const Chain*> survivors;
  for (const auto& c : chains) {
    if (c.alive) survivors.push_back(&c);
  }
  std::sort(survivors.begin(), survivors.end(), [](const Chain* x, const Chain* y) {
    return *std::min_element(x->path.begin(), x->path.end()) < *std::min_element(y->path.begin(), y->path.end());
  });
  std::vector<Edge> edges;
  for (const Chain* c : survivors) {
    edges.push_back({relabel[static_cast<std::size_t>(c->a)], relabel[static_cast<std::size_t>(c->b)]});
    out.weights.push_back(c->forward);
    out.weights.push_back(c->backward);
    out.paths.push_back(c->path);
  }
  if (out.vertex_map.empty()) {
    // A tree prunes down to nothing; keep one vertex so the result is a graph.
    out.vertex_map.push_back(0);
  }
  out.graph = Graph::multigraph(static_cast<int>(out.vertex_map.size()), edges);
  return out;
}

}  // namespace bethe_zeta
