#pragma once

// Interaction graphs for the two groups: an odd ring, two matched rings,
// or complete 4-subgroups with the fixed cross-connection pattern, plus a
// plain ring for the passive group. Vertices are 0-based internally.

#include <algorithm>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "encircle/errors.hpp"
#include "encircle/geometry.hpp"

namespace encircle {

enum class TopologyCase { OddRing, TwoRingsMatched, QuadGroups, PassiveRing };

inline const char* to_string(TopologyCase c) {
  switch (c) {
    case TopologyCase::OddRing: return "OddRing";
    case TopologyCase::TwoRingsMatched: return "TwoRingsMatched";
    case TopologyCase::QuadGroups: return "QuadGroups";
    case TopologyCase::PassiveRing: return "PassiveRing";
  }
  return "?";
}

struct Topology {
  int m = 0;
  int n = 0;
  std::vector<std::pair<int, int>> active_edges;   // i < k, 0-based
  std::vector<std::pair<int, int>> passive_edges;  // j < k, 0-based
  std::vector<std::vector<int>> active_nbrs;
  std::vector<std::vector<int>> passive_nbrs;
  TopologyCase active_case = TopologyCase::OddRing;

  int active_degree() const { return m > 0 ? static_cast<int>(active_nbrs[0].size()) : 0; }
};

namespace detail {

inline std::vector<std::pair<int, int>> canonical_edges(const std::set<std::pair<int, int>>& e) {
  std::vector<std::pair<int, int>> out(e.begin(), e.end());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::vector<int>> adjacency(const std::vector<std::pair<int, int>>& edges,
                                               int count) {
  std::vector<std::vector<int>> nbrs(count);
  for (auto [a, b] : edges) {
    nbrs[a].push_back(b);
    nbrs[b].push_back(a);
  }
  for (auto& v : nbrs) std::sort(v.begin(), v.end());
  return nbrs;
}

inline void insert_edge(std::set<std::pair<int, int>>& e, int a, int b) {
  e.insert({std::min(a, b), std::max(a, b)});
}

}  // namespace detail

inline Topology build_active_topology(int m) {
  if (m < 3) throw UnsupportedSize("build_active_topology: m must be >= 3");
  std::set<std::pair<int, int>> e;
  Topology t;
  t.m = m;
  if (m % 2 == 1) {
    t.active_case = TopologyCase::OddRing;
    for (int v = 0; v < m; ++v) detail::insert_edge(e, v, (v + 1) % m);
  } else if ((m / 2) % 2 == 1) {
    t.active_case = TopologyCase::TwoRingsMatched;
    const int l = m / 2;
    for (int v = 0; v < l; ++v) {
      detail::insert_edge(e, v, (v + 1) % l);
      detail::insert_edge(e, l + v, l + (v + 1) % l);
      detail::insert_edge(e, v, l + v);
    }
  } else {
    t.active_case = TopologyCase::QuadGroups;
    const int l = m / 4;
    for (int g = 0; g < l; ++g)
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) detail::insert_edge(e, 4 * g + a, 4 * g + b);
    // Cross-connections between every subgroup pair: member a of one
    // subgroup links to the two listed members of the other.
    constexpr int conn[4][2] = {{1, 2}, {2, 3}, {0, 3}, {0, 1}};
    for (int i = 1; i < l; ++i)
      for (int k = 0; k < i; ++k)
        for (int a = 0; a < 4; ++a)
          for (int c = 0; c < 2; ++c) detail::insert_edge(e, 4 * k + a, 4 * i + conn[a][c]);
  }
  t.active_edges = detail::canonical_edges(e);
  t.active_nbrs = detail::adjacency(t.active_edges, m);
  return t;
}

inline Topology build_passive_topology(int n) {
  if (n < 3) throw UnsupportedSize("build_passive_topology: n must be >= 3");
  std::set<std::pair<int, int>> e;
  for (int v = 0; v < n; ++v) detail::insert_edge(e, v, (v + 1) % n);
  Topology t;
  t.n = n;
  t.active_case = TopologyCase::PassiveRing;
  t.passive_edges = detail::canonical_edges(e);
  t.passive_nbrs = detail::adjacency(t.passive_edges, n);
  return t;
}

inline Topology combined_topology(int m, int n) {
  Topology t = build_active_topology(m);
  Topology p = build_passive_topology(n);
  t.n = n;
  t.passive_edges = std::move(p.passive_edges);
  t.passive_nbrs = std::move(p.passive_nbrs);
  return t;
}

// Circle-index offsets of the farthest positions on a uniform m-gon; their
// count equals the active degree of the matching topology case.
inline std::vector<int> farthest_offsets(int m) {
  if (m < 3) throw UnsupportedSize("farthest_offsets: m must be >= 3");
  std::vector<int> offs;
  if (m % 2 == 1) {
    offs = {(m - 1) / 2, (m + 1) / 2};
  } else if ((m / 2) % 2 == 1) {
    offs = {m / 2 - 1, m / 2, m / 2 + 1};
  } else {
    for (int o = m / 4; o <= 3 * m / 4; ++o) offs.push_back(o);
  }
  return offs;
}

// Active adjacency: each vertex joined to its d farthest pattern positions;
// passive: each joined to its 2 nearest. Degrees taken from the Assumption
// 1/2 cases for the given sizes.
inline Topology derive_topology_from_pattern(const std::vector<Vec2>& active,
                                             const std::vector<Vec2>& passive) {
  const int m = static_cast<int>(active.size());
  const int n = static_cast<int>(passive.size());
  if (m < 3 || n < 3) throw UnsupportedSize("derive_topology_from_pattern: m, n must be >= 3");
  const int da = static_cast<int>(farthest_offsets(m).size());

  auto pick = [](const std::vector<Vec2>& pts, int v, int want, bool farthest) {
    const int k = static_cast<int>(pts.size());
    std::vector<std::pair<double, int>> d;
    for (int u = 0; u < k; ++u) {
      if (u == v) continue;
      const double dist = (pts[u] - pts[v]).norm();
      d.push_back({farthest ? -dist : dist, u});
    }
    std::sort(d.begin(), d.end());
    if (want < static_cast<int>(d.size()) &&
        std::abs(d[want - 1].first - d[want].first) < 1e-9 * std::abs(d[0].first))
      throw TieBreak("derive_topology_from_pattern: distance tie at the degree cutoff");
    std::vector<int> out;
    for (int i = 0; i < want; ++i) out.push_back(d[i].second);
    return out;
  };

  std::set<std::pair<int, int>> ea, ep;
  for (int v = 0; v < m; ++v)
    for (int u : pick(active, v, da, /*farthest=*/true)) detail::insert_edge(ea, v, u);
  for (int v = 0; v < n; ++v)
    for (int u : pick(passive, v, 2, /*farthest=*/false)) detail::insert_edge(ep, v, u);

  Topology t;
  t.m = m;
  t.n = n;
  t.active_case = build_active_topology(m).active_case;
  t.active_edges = detail::canonical_edges(ea);
  t.passive_edges = detail::canonical_edges(ep);
  t.active_nbrs = detail::adjacency(t.active_edges, m);
  t.passive_nbrs = detail::adjacency(t.passive_edges, n);
  return t;
}

inline bool is_connected(const std::vector<std::vector<int>>& nbrs) {
  const int k = static_cast<int>(nbrs.size());
  if (k == 0) return true;
  std::vector<bool> seen(k, false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int reached = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int u : nbrs[v])
      if (!seen[u]) {
        seen[u] = true;
        ++reached;
        q.push(u);
      }
  }
  return reached == k;
}

}  // namespace encircle
