#pragma once

#include <algorithm>
#include <cstddef>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bethe_zeta/error.hpp"
#include "bethe_zeta/linalg.hpp"

namespace bethe_zeta {

struct Edge {
  int u = 0;
  int v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Connected undirected graph with its directed-edge structure.
///
/// Undirected edge k yields the directed pair 2k = (u -> v) and
/// 2k+1 = (v -> u), so the inverse of directed edge e is e ^ 1.
/// Graphs read from user input are simple. Reductions produce multigraphs
/// (self-loops and parallel edges), which share this representation: a
/// self-loop still contributes two distinct directed edges.
class Graph {
 public:
  Graph() = default;

  /// Validated simple connected graph.
  static Graph simple(int num_vertices, const std::vector<Edge>& edges) {
    const std::string op = "build_graph";
    if (num_vertices < 1) fail(ErrorKind::InvalidArgument, op, "graph needs at least one vertex");
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges) {
      if (e.u < 0 || e.v < 0 || e.u >= num_vertices || e.v >= num_vertices)
        fail(ErrorKind::InvalidArgument, op, "vertex index out of range");
      if (e.u == e.v) fail(ErrorKind::SelfLoop, op, "vertex " + std::to_string(e.u));
      const auto key = std::minmax(e.u, e.v);
      if (!seen.insert(key).second)
        fail(ErrorKind::DuplicateEdge, op, std::to_string(e.u) + "-" + std::to_string(e.v));
    }
    Graph g(num_vertices, edges);
    if (!g.connected()) fail(ErrorKind::DisconnectedGraph, op);
    return g;
  }

  /// Multigraph with loops and parallel edges allowed; still must be connected.
  static Graph multigraph(int num_vertices, const std::vector<Edge>& edges) {
    const std::string op = "build_multigraph";
    if (num_vertices < 1) fail(ErrorKind::InvalidArgument, op, "graph needs at least one vertex");
    for (const auto& e : edges) {
      if (e.u < 0 || e.v < 0 || e.u >= num_vertices || e.v >= num_vertices)
        fail(ErrorKind::InvalidArgument, op, "vertex index out of range");
    }
    Graph g(num_vertices, edges);
    if (!g.connected()) fail(ErrorKind::DisconnectedGraph, op);
    return g;
  }

  int num_vertices() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_directed() const { return 2 * num_edges(); }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int k) const { return edges_[static_cast<std::size_t>(k)]; }

  int origin(int e) const { return (e & 1) ? edges_[e >> 1].v : edges_[e >> 1].u; }
  int terminus(int e) const { return (e & 1) ? edges_[e >> 1].u : edges_[e >> 1].v; }
  static int inverse(int e) { return e ^ 1; }
  static int undirected(int e) { return e >> 1; }

  /// Directed edges e with t(e) = i.
  const std::vector<int>& incoming(int i) const { return incoming_[static_cast<std::size_t>(i)]; }
  /// Directed edges e with o(e) = i.
  const std::vector<int>& outgoing(int i) const { return outgoing_[static_cast<std::size_t>(i)]; }

  /// Degree counting a self-loop twice.
  int degree(int i) const { return static_cast<int>(incoming_[static_cast<std::size_t>(i)].size()); }

  bool is_simple() const {
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges_) {
      if (e.u == e.v) return false;
      if (!seen.insert(std::minmax(e.u, e.v)).second) return false;
    }
    return true;
  }

  /// Index of the undirected edge joining i and j in a simple graph, or -1.
  int find_edge(int i, int j) const {
    for (int e : outgoing(i)) {
      if (terminus(e) == j) return undirected(e);
    }
    return -1;
  }

 private:
  Graph(int n, std::vector<Edge> edges)
      : n_(n),
        edges_(std::move(edges)),
        incoming_(static_cast<std::size_t>(n)),
        outgoing_(static_cast<std::size_t>(n)) {
    for (int e = 0; e < num_directed(); ++e) {
      outgoing_[static_cast<std::size_t>(origin(e))].push_back(e);
      incoming_[static_cast<std::size_t>(terminus(e))].push_back(e);
    }
  }

  bool connected() const {
    std::vector<bool> seen(static_cast<std::size_t>(n_), false);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = true;
    int reached = 1;
    while (!frontier.empty()) {
      const int i = frontier.front();
      frontier.pop();
      for (int e : outgoing(i)) {
        const int j = terminus(e);
        if (!seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = true;
          ++reached;
          frontier.push(j);
        }
      }
    }
    return reached == n_;
  }

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incoming_;
  std::vector<std::vector<int>> outgoing_;
};

inline Graph build_graph(int num_vertices, const std::vector<Edge>& edges) {
  return Graph::simple(num_vertices, edges);
}

/// Non-backtracking matrix: M(e, e') = 1 iff e != inverse(e') and o(e) = t(e').
inline Matrix directed_edge_matrix(const Graph& g) {
  const int d = g.num_directed();
  Matrix m = Matrix::Zero(d, d);
  for (int e = 0; e < d; ++e) {
    for (int ep : g.incoming(g.origin(e))) {
      if (ep != Graph::inverse(e)) m(e, ep) = 1.0;
    }
  }
  return m;
}

/// Number of independent cycles, M - N + 1.
inline int cycle_rank(const Graph& g) { return g.num_edges() - g.num_vertices() + 1; }

/// Directed edges lying on some closed non-backtracking walk, i.e. both
/// endpoints survive repeated removal of degree-one vertices. The remaining
/// directed edges form acyclic parts of the non-backtracking flow, so any
/// weighted version of M restricted to them is nilpotent and M is block
/// triangular with respect to this split.
inline std::vector<int> core_directed_edges(const Graph& g) {
  std::vector<int> deg(static_cast<std::size_t>(g.num_vertices()));
  std::vector<bool> removed(static_cast<std::size_t>(g.num_vertices()), false);
  for (int i = 0; i < g.num_vertices(); ++i) deg[static_cast<std::size_t>(i)] = g.degree(i);
  std::queue<int> leaves;
  for (int i = 0; i < g.num_vertices(); ++i) {
    if (deg[static_cast<std::size_t>(i)] <= 1) leaves.push(i);
  }
  while (!leaves.empty()) {
    const int i = leaves.front();
    leaves.pop();
    if (removed[static_cast<std::size_t>(i)]) continue;
    removed[static_cast<std::size_t>(i)] = true;
    for (int e : g.outgoing(i)) {
      const int j = g.terminus(e);
      if (removed[static_cast<std::size_t>(j)]) continue;
      if (--deg[static_cast<std::size_t>(j)] <= 1) leaves.push(j);
    }
  }
  std::vector<int> core;
  for (int e = 0; e < g.num_directed(); ++e) {
    if (!removed[static_cast<std::size_t>(g.origin(e))] && !removed[static_cast<std::size_t>(g.terminus(e))])
      core.push_back(e);
  }
  return core;
}

/// Spectrum of diag(w) * M where w is a per-directed-edge weight. Directed
/// edges outside the core contribute exact zeros; the dense eigensolver runs
/// on the core block only.
inline std::vector<Complex> weighted_nonbacktracking_spectrum(const Graph& g, const std::vector<double>& w) {
  const Matrix m = directed_edge_matrix(g);
  const auto core = core_directed_edges(g);
  const auto k = static_cast<Eigen::Index>(core.size());
  Matrix block(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      block(a, b) = w[static_cast<std::size_t>(core[a])] * m(core[a], core[b]);
    }
  }
  auto ev = eigenvalues(block);
  ev.resize(static_cast<std::size_t>(g.num_directed()), Complex(0.0, 0.0));
  std::sort(ev.begin(), ev.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return ev;
}

/// Perron-Frobenius eigenvalue of M (0 for trees).
inline double perron_eigenvalue(const Graph& g) {
  return spectral_radius(weighted_nonbacktracking_spectrum(g, std::vector<double>(static_cast<std::size_t>(g.num_directed()), 1.0)));
}

/// Length of the shortest cycle through undirected edge k, or 0 when the edge
/// is a bridge. Simple graphs only.
inline int shortest_cycle_through(const Graph& g, int k) {
  const Edge& ed = g.edge(k);
  std::vector<int> dist(static_cast<std::size_t>(g.num_vertices()), -1);
  std::queue<int> frontier;
  dist[static_cast<std::size_t>(ed.u)] = 0;
  frontier.push(ed.u);
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop();
    for (int e : g.outgoing(i)) {
      if (Graph::undirected(e) == k) continue;
      const int j = g.terminus(e);
      if (dist[static_cast<std::size_t>(j)] < 0) {
        dist[static_cast<std::size_t>(j)] = dist[static_cast<std::size_t>(i)] + 1;
        frontier.push(j);
      }
    }
  }
  const int d = dist[static_cast<std::size_t>(ed.v)];
  return d < 0 ? 0 : d + 1;
}

}  // namespace bethe_zeta
