#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "bethe_zeta/error.hpp"
#include "bethe_zeta/graph.hpp"

namespace bethe_zeta {

/// Representative of a prime cycle: the lexicographically smallest rotation
/// of a primitive closed non-backtracking walk.
struct PrimeCycle {
  std::vector<int> edges;

  std::size_t length() const { return edges.size(); }
  friend bool operator==(const PrimeCycle&, const PrimeCycle&) = default;
  friend auto operator<=>(const PrimeCycle& a, const PrimeCycle& b) { return a.edges <=> b.edges; }
};

inline constexpr std::size_t kDefaultPrimeCycleCap = 2'000'000;

namespace detail {

inline bool is_primitive(const std::vector<int>& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = w[i] == w[i - p];
    if (periodic) return false;
  }
  return true;
}

inline bool is_min_rotation(const std::vector<int>& w) {
  const std::size_t n = w.size();
  for (std::size_t r = 1; r < n; ++r) {
    if (w[r] != w[0]) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const int a = w[(r + i) % n];
      const int b = w[i];
      if (a < b) return false;
      if (a > b) break;
    }
  }
  return true;
}

}  // namespace detail

/// All prime cycles of length <= max_len, sorted by canonical form.
///
/// Depth-first search over non-backtracking walks that start at directed edge
/// s and only use edges with index >= s; a closed walk is kept when it is
/// primitive and equals its own minimal rotation, so each class appears once.
inline std::vector<PrimeCycle> enumerate_prime_cycles(const Graph& g, int max_len,
                                                      std::size_t cap = kDefaultPrimeCycleCap) {
  if (max_len < 1) fail(ErrorKind::InvalidArgument, "enumerate_prime_cycles", "max_len must be >= 1");
  std::vector<PrimeCycle> out;
  std::vector<int> walk;
  walk.reserve(static_cast<std::size_t>(max_len));

  auto closes = [&](int last, int first) {
    return g.terminus(last) == g.origin(first) && last != Graph::inverse(first);
  };

  auto dfs = [&](auto&& self, int start) -> void {
    const int last = walk.back();
    if (closes(last, start) && detail::is_primitive(walk) && detail::is_min_rotation(walk)) {
      out.push_back(PrimeCycle{walk});
      if (out.size() > cap)
        fail(ErrorKind::LimitExceeded, "enumerate_prime_cycles",
             "more than " + std::to_string(cap) + " prime cycles");
    }
    if (static_cast<int>(walk.size()) == max_len) return;
    for (int next : g.outgoing(g.terminus(last))) {
      if (next < start || next == Graph::inverse(last)) continue;
      walk.push_back(next);
      self(self, start);
      walk.pop_back();
    }
  };

  for (int s = 0; s < g.num_directed(); ++s) {
    walk.assign(1, s);
    dfs(dfs, s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace bethe_zeta
