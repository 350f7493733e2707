#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "mapf/plan.hpp"

namespace mapf {

struct TimedNode {
  int t = 0;
  NodeId v = 0;
};

inline bool operator==(const TimedNode& a, const TimedNode& b) { return a.t == b.t && a.v == b.v; }
inline bool operator<(const TimedNode& a, const TimedNode& b) {
  return a.t != b.t ? a.t < b.t : a.v < b.v;
}

// Layered DAG of (location, timestep) pairs holding every timed path of
// horizon cost_bound from start to goal. Layer t is sorted; every vertex lies
// on at least one start-to-goal path.
struct Mdd {
  NodeId start = 0, goal = 0;
  int cost_bound = 0;
  std::vector<std::vector<NodeId>> layers;                      // t -> nodes
  std::vector<std::vector<std::pair<NodeId, NodeId>>> edges;    // t -> (u@t, v@t+1)

  bool empty() const { return layers.empty() || layers.front().empty(); }
  bool contains(int t, NodeId v) const {
    if (t < 0 || t >= static_cast<int>(layers.size())) return false;
    return std::binary_search(layers[t].begin(), layers[t].end(), v);
  }
  int layer_width(int t) const {
    return t < static_cast<int>(layers.size()) ? static_cast<int>(layers[t].size()) : 0;
  }
  bool has_edge(int t, NodeId u, NodeId v) const {
    if (t < 0 || t >= static_cast<int>(edges.size())) return false;
    const auto& es = edges[t];
    return std::find(es.begin(), es.end(), std::make_pair(u, v)) != es.end();
  }
};

namespace detail {

// drop vertices not on any start-to-goal path; returns removed vertices
inline std::vector<TimedNode> mdd_sweep_unreachable(Mdd& m) {
  std::vector<TimedNode> removed;
  if (m.layers.empty()) return removed;
  const int c = m.cost_bound;
  std::vector<std::vector<char>> alive(c + 1);
  for (int t = 0; t <= c; ++t) alive[t].assign(m.layers[t].size(), 0);

  auto index_of = [&](int t, NodeId v) {
    const auto& layer = m.layers[t];
    return static_cast<int>(std::lower_bound(layer.begin(), layer.end(), v) - layer.begin());
  };

  // forward pass from layer 0
  std::vector<std::vector<char>> fwd(alive);
  for (size_t k = 0; k < m.layers[0].size(); ++k) fwd[0][k] = 1;
  for (int t = 0; t < c; ++t)
    for (const auto& [u, v] : m.edges[t])
      if (fwd[t][index_of(t, u)]) fwd[t + 1][index_of(t + 1, v)] = 1;
  // backward pass from layer c
  std::vector<std::vector<char>> bwd(alive);
  for (size_t k = 0; k < m.layers[c].size(); ++k) bwd[c][k] = 1;
  for (int t = c - 1; t >= 0; --t)
    for (const auto& [u, v] : m.edges[t])
      if (bwd[t + 1][index_of(t + 1, v)]) bwd[t][index_of(t, u)] = 1;

  for (int t = 0; t <= c; ++t)
    for (size_t k = 0; k < m.layers[t].size(); ++k)
      if (!(fwd[t][k] && bwd[t][k])) removed.push_back({t, m.layers[t][k]});

  if (removed.empty()) return removed;
  for (int t = 0; t <= c; ++t) {
    std::vector<NodeId> kept;
    for (size_t k = 0; k < m.layers[t].size(); ++k)
      if (fwd[t][k] && bwd[t][k]) kept.push_back(m.layers[t][k]);
    m.layers[t] = std::move(kept);
  }
  for (int t = 0; t < c; ++t) {
    auto& es = m.edges[t];
    es.erase(std::remove_if(es.begin(), es.end(),
                            [&](const auto& e) {
                              return !m.contains(t, e.first) || !m.contains(t + 1, e.second);
                            }),
             es.end());
  }
  return removed;
}

}  // namespace detail

// Complete MDD of all horizon-c timed paths: vertex (v, t) is kept iff
// dist(start, v) <= t and t + dist(v, goal) <= c. Empty when
// dist(start, goal) > c.
inline Mdd build_mdd(const Graph& g, NodeId start, NodeId goal, int c) {
  Mdd m;
  m.start = start;
  m.goal = goal;
  m.cost_bound = c;
  const auto& from_start = g.distance_table(start).dist;
  const auto& to_goal = g.distance_table(goal).dist;
  if (from_start[goal] == kUnreachable || from_start[goal] > c) return m;

  m.layers.resize(c + 1);
  m.edges.resize(c);
  auto admissible = [&](NodeId v, int t) {
    return from_start[v] != kUnreachable && to_goal[v] != kUnreachable &&
           from_start[v] <= t && t + to_goal[v] <= c;
  };
  m.layers[0] = {start};
  for (int t = 0; t < c; ++t) {
    std::vector<NodeId> next;
    for (const NodeId u : m.layers[t]) {
      if (admissible(u, t + 1)) next.push_back(u);  // wait
      for (const NodeId v : g.neighbors(u))
        if (admissible(v, t + 1)) next.push_back(v);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    m.layers[t + 1] = std::move(next);
    for (const NodeId u : m.layers[t]) {
      if (m.contains(t + 1, u)) m.edges[t].push_back({u, u});
      for (const NodeId v : g.neighbors(u))
        if (m.contains(t + 1, v)) m.edges[t].push_back({u, v});
    }
    std::sort(m.edges[t].begin(), m.edges[t].end());
  }
  return m;
}

struct PruneReport {
  bool changed = false;
  std::vector<TimedNode> removed_conflict;     // direct vertex-conflict removals
  std::vector<TimedNode> removed_unreachable;  // cascade removals
  int removed_edges = 0;                       // direct swap-edge removals
};

// Remove every MDD vertex in vertex conflict with other_path and every MDD
// edge in swap conflict with other_path's move at that timestep, then drop
// vertices no longer on any start-to-goal path. other_path is treated as
// parked at its end beyond its horizon.
inline PruneReport prune_mdd(Mdd& m, const Path& other) {
  PruneReport rep;
  if (m.empty()) return rep;
  const int c = m.cost_bound;
  for (int t = 0; t <= c; ++t) {
    const NodeId ov = position(other, t);
    if (!m.contains(t, ov)) continue;
    rep.removed_conflict.push_back({t, ov});
    auto& layer = m.layers[t];
    layer.erase(std::lower_bound(layer.begin(), layer.end(), ov));
    if (t < c) {
      auto& es = m.edges[t];
      es.erase(std::remove_if(es.begin(), es.end(), [&](const auto& e) { return e.first == ov; }),
               es.end());
    }
    if (t > 0) {
      auto& es = m.edges[t - 1];
      es.erase(std::remove_if(es.begin(), es.end(), [&](const auto& e) { return e.second == ov; }),
               es.end());
    }
  }
  for (int t = 0; t < c; ++t) {
    // my move u->v swaps with the other agent's move v->u over [t, t+1]
    const NodeId ofrom = position(other, t);
    const NodeId oto = position(other, t + 1);
    if (ofrom == oto) continue;
    auto& es = m.edges[t];
    const auto it = std::find(es.begin(), es.end(), std::make_pair(oto, ofrom));
    if (it != es.end()) {
      es.erase(it);
      ++rep.removed_edges;
    }
  }
  if (!rep.removed_conflict.empty() || rep.removed_edges > 0) {
    rep.changed = true;
    rep.removed_unreachable = detail::mdd_sweep_unreachable(m);
  }
  return rep;
}

}  // namespace mapf
