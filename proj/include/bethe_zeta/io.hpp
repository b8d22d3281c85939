#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bethe_zeta/bethe.hpp"
#include "bethe_zeta/error.hpp"
#include "bethe_zeta/graph.hpp"
#include "bethe_zeta/model.hpp"

namespace bethe_zeta {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

[[noreturn]] inline void schema_fail(const std::string& what) { fail(ErrorKind::SchemaError, "parse_model", what); }

inline const json& require_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) schema_fail(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

inline double require_number(const json& j, const std::string& what) {
  if (!j.is_number()) schema_fail(what + " must be a number");
  return j.get<double>();
}

inline std::string edge_key(const Edge& e) { return std::to_string(e.u) + "-" + std::to_string(e.v); }

}  // namespace detail

/// {"vertices": N, "edges": [[i, j], ...], "multigraph": false}
inline Graph graph_from_json(const json& j) {
  const json& n = detail::require_field(j, "vertices");
  if (!n.is_number_integer()) detail::schema_fail("\"vertices\" must be an integer");
  const json& list = detail::require_field(j, "edges");
  if (!list.is_array()) detail::schema_fail("\"edges\" must be an array");
  std::vector<Edge> edges;
  for (const auto& e : list) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      detail::schema_fail("each edge must be a pair of integers");
    edges.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  const bool multi = j.contains("multigraph") && j.at("multigraph").is_boolean() && j.at("multigraph").get<bool>();
  return multi ? Graph::multigraph(n.get<int>(), edges) : Graph::simple(n.get<int>(), edges);
}

inline json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
  json j{{"vertices", g.num_vertices()}, {"edges", edges}};
  if (!g.is_simple()) j["multigraph"] = true;
  return j;
}

/// {"graph": ..., "J": {"i-j": v} or [v per edge], "h": [v per vertex]}.
/// "h" may be omitted (all zero).
inline BinaryPairwiseModel model_from_json(const json& j) {
  Graph g = graph_from_json(detail::require_field(j, "graph"));
  std::vector<double> coupling(static_cast<std::size_t>(g.num_edges()), 0.0);
  const json& jj = detail::require_field(j, "J");
  if (jj.is_array()) {
    if (static_cast<int>(jj.size()) != g.num_edges()) detail::schema_fail("\"J\" array needs one value per edge");
    for (int k = 0; k < g.num_edges(); ++k)
      coupling[static_cast<std::size_t>(k)] = detail::require_number(jj[static_cast<std::size_t>(k)], "coupling");
  } else if (jj.is_object()) {
    if (!g.is_simple()) detail::schema_fail("multigraph couplings must be given as an array");
    std::vector<bool> given(coupling.size(), false);
    for (const auto& [key, value] : jj.items()) {
      int a = -1, b = -1;
      char dash = 0;
      std::istringstream in(key);
      if (!(in >> a >> dash >> b) || dash != '-' || !in.eof()) detail::schema_fail("bad coupling key \"" + key + "\"");
      if (a < 0 || b < 0 || a >= g.num_vertices() || b >= g.num_vertices())
        detail::schema_fail("coupling key \"" + key + "\" names a vertex out of range");
      const int k = g.find_edge(a, b);
      if (k < 0) detail::schema_fail("coupling key \"" + key + "\" is not an edge");
      if (given[static_cast<std::size_t>(k)]) detail::schema_fail("coupling for edge \"" + key + "\" given twice");
      given[static_cast<std::size_t>(k)] = true;
      coupling[static_cast<std::size_t>(k)] = detail::require_number(value, "coupling");
    }
    for (int k = 0; k < g.num_edges(); ++k) {
      if (!given[static_cast<std::size_t>(k)]) detail::schema_fail("missing coupling for edge " + detail::edge_key(g.edge(k)));
    }
  } else {
    detail::schema_fail("\"J\" must be an object or an array");
  }
  std::vector<double> field(static_cast<std::size_t>(g.num_vertices()), 0.0);
  if (j.contains("h")) {
    const json& h = j.at("h");
    if (!h.is_array() || static_cast<int>(h.size()) != g.num_vertices())
      detail::schema_fail("\"h\" must be an array with one value per vertex");
    for (int i = 0; i < g.num_vertices(); ++i)
      field[static_cast<std::size_t>(i)] = detail::require_number(h[static_cast<std::size_t>(i)], "field");
  }
  return {std::move(g), std::move(coupling), std::move(field)};
}

inline json model_to_json(const BinaryPairwiseModel& model) {
  const Graph& g = model.graph;
  json couplings;
  if (g.is_simple()) {
    couplings = json::object();
    for (int k = 0; k < g.num_edges(); ++k) couplings[detail::edge_key(g.edge(k))] = model.coupling[static_cast<std::size_t>(k)];
  } else {
    couplings = model.coupling;
  }
  return {{"graph", graph_to_json(g)}, {"J", couplings}, {"h", model.field}};
}

/// {"m": [...], "chi": [...]}
inline Pseudomarginals pseudomarginals_from_json(const Graph& g, const json& j) {
  Pseudomarginals q;
  const json& m = detail::require_field(j, "m");
  const json& chi = detail::require_field(j, "chi");
  if (!m.is_array() || static_cast<int>(m.size()) != g.num_vertices()) detail::schema_fail("\"m\" needs one value per vertex");
  if (!chi.is_array() || static_cast<int>(chi.size()) != g.num_edges()) detail::schema_fail("\"chi\" needs one value per edge");
  for (const auto& v : m) q.m.push_back(detail::require_number(v, "m"));
  for (const auto& v : chi) q.chi.push_back(detail::require_number(v, "chi"));
  return q;
}

inline json pseudomarginals_to_json(const Pseudomarginals& q) { return {{"m", q.m}, {"chi", q.chi}}; }

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "read_json_file", "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::SchemaError, "read_json_file", path + ": " + e.what());
  }
}

struct GeneratorParams {
  int n = 4;
  int m = 0;
  double coupling = 1.0;
  double field = 0.0;
  std::uint64_t seed = 0;
};

/// Named instances. Couplings are uniform (`coupling`) except where a sign
/// pattern is part of the instance; random-gnm draws J and h uniformly from
/// [-coupling, coupling] and [-field, field].
inline BinaryPairwiseModel builtin_model(const std::string& name, const GeneratorParams& p = {}) {
  const char* op = "builtin_graphs";
  auto uniform = [&](Graph g) {
    std::vector<double> j(static_cast<std::size_t>(g.num_edges()), p.coupling);
    std::vector<double> h(static_cast<std::size_t>(g.num_vertices()), p.field);
    return BinaryPairwiseModel(std::move(g), std::move(j), std::move(h));
  };
  auto with_signs = [&](Graph g, const std::vector<int>& signs) {
    auto model = uniform(std::move(g));
    for (std::size_t k = 0; k < signs.size(); ++k) model.coupling[k] *= signs[k];
    return model;
  };
  if (name == "path") {
    if (p.n < 1) fail(ErrorKind::InvalidArgument, op, "path needs n >= 1");
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < p.n; ++i) edges.push_back({i, i + 1});
    return uniform(Graph::simple(p.n, edges));
  }
  if (name == "cycle") {
    if (p.n < 3) fail(ErrorKind::InvalidArgument, op, "cycle needs n >= 3");
    std::vector<Edge> edges;
    for (int i = 0; i < p.n; ++i) edges.push_back({i, (i + 1) % p.n});
    return uniform(Graph::simple(p.n, edges));
  }
  if (name == "k4") return uniform(Graph::simple(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}));
  if (name == "example2") {
    // Vertices 1..4 of the two-cycle example map to 0..3; edge 1-2 is repulsive.
    return with_signs(Graph::simple(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {2, 3}}), {-1, 1, 1, 1, 1});
  }
  if (name == "theta") return with_signs(Graph::multigraph(2, {{0, 1}, {0, 1}, {0, 1}}), {-1, 1, 1});
  if (name == "barbell") return uniform(Graph::multigraph(2, {{0, 0}, {0, 1}, {1, 1}}));
  if (name == "type4-loops") return with_signs(Graph::multigraph(1, {{0, 0}, {0, 0}}), {1, -1});
  if (name == "type5-loops") return with_signs(Graph::multigraph(1, {{0, 0}, {0, 0}}), {-1, -1});
  if (name == "random-gnm") {
    if (p.n < 1 || p.m < p.n - 1 || p.m > p.n * (p.n - 1) / 2)
      fail(ErrorKind::InvalidArgument, op, "random-gnm needs n - 1 <= m <= n(n-1)/2");
    std::mt19937_64 rng(p.seed);
    std::vector<Edge> edges;
    std::set<std::pair<int, int>> used;
    std::vector<int> order(static_cast<std::size_t>(p.n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 1; i < p.n; ++i) {
      const int parent = order[std::uniform_int_distribution<std::size_t>(0, static_cast<std::size_t>(i - 1))(rng)];
      const int child = order[static_cast<std::size_t>(i)];
      edges.push_back({std::min(parent, child), std::max(parent, child)});
      used.insert(std::minmax(parent, child));
    }
    std::uniform_int_distribution<int> vertex(0, p.n - 1);
    while (static_cast<int>(edges.size()) < p.m) {
      const int a = vertex(rng), b = vertex(rng);
      if (a == b || !used.insert(std::minmax(a, b)).second) continue;
      edges.push_back({std::min(a, b), std::max(a, b)});
    }
    Graph g = Graph::simple(p.n, edges);
    std::uniform_real_distribution<double> jd(-p.coupling, p.coupling);
    std::uniform_real_distribution<double> hd(-p.field, p.field);
    std::vector<double> j(static_cast<std::size_t>(g.num_edges())), h(static_cast<std::size_t>(g.num_vertices()));
    for (auto& v : j) v = p.coupling > 0.0 ? jd(rng) : 0.0;
    for (auto& v : h) v = p.field > 0.0 ? hd(rng) : 0.0;
    return {std::move(g), std::move(j), std::move(h)};
  }
  fail(ErrorKind::UnknownGenerator, op, name);
}

}  // namespace bethe_zeta
