// Brute-force references used across the tests. None of them calls the
// distance or sphere code of the library.
#pragma once

#include <deque>
#include <limits>
#include <vector>

#include "coarse/covers.hpp"
#include "coarse/spaces.hpp"

namespace oracle {

using coarse::Distance;
using coarse::PointId;

inline std::vector<Distance> bfs(const std::vector<std::vector<PointId>>& adj, PointId source) {
  std::vector<Distance> d(adj.size(), -1);
  std::deque<PointId> q{source};
  d[source] = 0;
  while (!q.empty()) {
    auto x = q.front();
    q.pop_front();
    for (auto y : adj[x]) {
      if (d[y] < 0) {
        d[y] = d[x] + 1;
        q.push_back(y);
      }
    }
  }
  return d;
}

// Grid adjacency from the coordinates.
inline std::vector<std::vector<PointId>> grid_adjacency(const coarse::GridSpace& g) {
  std::vector<std::vector<PointId>> adj(g.size());
  for (PointId x = 0; x < g.size(); ++x) {
    auto c = g.coords(x);
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (int s : {-1, 1}) {
        std::vector<std::int64_t> z(c.begin(), c.end());
        z[i] += s;
        if (auto y = g.index_of(z)) adj[x].push_back(*y);
      }
    }
  }
  return adj;
}

// Tree adjacency from the parent pointers.
inline std::vector<std::vector<PointId>> tree_adjacency(const coarse::TreeBall& t) {
  std::vector<std::vector<PointId>> adj(t.size());
  for (std::size_t v = 0; v < t.size(); ++v) {
    if (t.parent[v] >= 0) {
      adj[v].push_back(static_cast<PointId>(t.parent[v]));
      adj[static_cast<std::size_t>(t.parent[v])].push_back(static_cast<PointId>(v));
    }
  }
  return adj;
}

// Pointwise Lebesgue value straight from the definition: the best set's
// distance to its complement within the window, capped at ir(x) + 1.
inline std::vector<Distance> lebesgue_values(const coarse::Cover& cover) {
  const auto& s = *cover.space;
  std::vector<Distance> out(s.size(), 0);
  for (PointId x = 0; x < s.size(); ++x) {
    const Distance cap = s.interior_radius(x) >= coarse::kUnbounded ? coarse::kUnbounded : s.interior_radius(x) + 1;
    for (const auto& set : cover.sets) {
      if (!std::binary_search(set.begin(), set.end(), x)) continue;
      Distance to_complement = cap;
      for (PointId y = 0; y < s.size(); ++y) {
        if (!std::binary_search(set.begin(), set.end(), y)) to_complement = std::min(to_complement, s.distance(x, y));
      }
      out[x] = std::max(out[x], to_complement);
    }
  }
  return out;
}

inline Distance brute_mesh(const coarse::Cover& cover) {
  Distance m = 0;
  for (const auto& set : cover.sets)
    for (auto a : set)
      for (auto b : set) m = std::max(m, cover.space->distance(a, b));
  return m;
}

}  // namespace oracle
