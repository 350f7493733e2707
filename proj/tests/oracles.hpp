#pragma once

// Independent test oracles. Everything here recomputes results from first
// principles and stays off the library's solver code paths.

#include <map>
#include <queue>

#include "mapf/astar.hpp"
#include "mapf/instance.hpp"

namespace oracle {

using mapf::Graph;
using mapf::Instance;
using mapf::NodeId;
using mapf::Path;

// fresh, uncached BFS per query
inline int naive_bfs(const Graph& g, NodeId from, NodeId to) {
  if (from == to) return 0;
  std::vector<int> dist(g.node_count(), -1);
  dist[from] = 0;
  std::queue<NodeId> q;
  q.push(from);
  while (!q.empty()) {
    const NodeId v = q.front();
    q.pop();
    for (const NodeId u : g.neighbors(v)) {
      if (dist[u] >= 0) continue;
      dist[u] = dist[v] + 1;
      if (u == to) return dist[u];
      q.push(u);
    }
  }
  return mapf::kUnreachable;
}

// every timed path of exactly `length` moves from start that ends at goal
inline std::vector<Path> enumerate_timed_paths(const Graph& g, NodeId start, NodeId goal,
                                               int length) {
  std::vector<Path> out;
  Path cur{start};
  auto rec = [&](auto&& self, NodeId v, int t) -> void {
    if (t == length) {
      if (v == goal) out.push_back(cur);
      return;
    }
    // admissible pruning would bias the oracle; enumerate everything
    auto step = [&](NodeId u) {
      cur.push_back(u);
      self(self, u, t + 1);
      cur.pop_back();
    };
    step(v);
    for (const NodeId u : g.neighbors(v)) step(u);
  };
  rec(rec, start, 0);
  return out;
}

// pairwise vertex/swap conflict between two padded paths
inline bool paths_conflict(const Path& a, const Path& b) {
  const int T = std::max(a.size(), b.size()) - 1;
  for (int t = 0; t <= T; ++t) {
    if (mapf::position(a, t) == mapf::position(b, t)) return true;
    if (t < T && mapf::position(a, t) == mapf::position(b, t + 1) &&
        mapf::position(a, t + 1) == mapf::position(b, t) &&
        mapf::position(a, t) != mapf::position(a, t + 1))
      return true;
  }
  return false;
}

// definition-level well-formedness: per-agent BFS with all other endpoints
// deleted
inline bool well_formed(const Instance& ins) {
  for (int i = 0; i < ins.n(); ++i) {
    std::vector<char> removed(ins.graph->node_count(), 0);
    for (int j = 0; j < ins.n(); ++j)
      if (j != i) removed[ins.starts[j]] = removed[ins.goals[j]] = 1;
    if (removed[ins.starts[i]] || removed[ins.goals[i]]) return false;
    std::queue<NodeId> q;
    std::vector<char> seen(ins.graph->node_count(), 0);
    q.push(ins.starts[i]);
    seen[ins.starts[i]] = 1;
    bool found = ins.starts[i] == ins.goals[i];
    while (!q.empty() && !found) {
      const NodeId v = q.front();
      q.pop();
      for (const NodeId u : ins.graph->neighbors(v)) {
        if (seen[u] || removed[u]) continue;
        seen[u] = 1;
        if (u == ins.goals[i]) {
          found = true;
          break;
        }
        q.push(u);
      }
    }
    if (!found) return false;
  }
  return true;
}

// Exact joint-state optimum of the sum-of-costs objective, by A* over
// (positions, committed set[, time]). A committed agent rests at its goal
// forever; each transition charges one unit per uncommitted agent, which
// reproduces sum-of-costs exactly (an agent's cost is its commit time).
// Supports at most 6 agents on graphs with at most 255 nodes. Fixed
// obstacles (for subset refinement oracles) are honored when given.
inline long long joint_optimal_sum_of_costs(const Instance& ins,
                                            const mapf::FixedObstacles* obstacles = nullptr,
                                            int time_cap = 512) {
  const Graph& g = *ins.graph;
  const int n = ins.n();
  if (n > 6 || g.node_count() > 255) throw std::invalid_argument("oracle limits exceeded");
  const int full = (1 << n) - 1;
  const int H = obstacles ? obstacles->horizon() + 1 : 0;  // obstacles static from H on

  std::vector<const std::vector<int>*> dist(n);
  for (int i = 0; i < n; ++i) dist[i] = &g.distance_table(ins.goals[i]).dist;

  auto key_of = [&](const std::vector<NodeId>& pos, int mask, int t) {
    uint64_t k = 0;
    for (int i = 0; i < n; ++i) k = (k << 8) | static_cast<uint8_t>(pos[i]);
    k = (k << 6) | static_cast<uint8_t>(mask);
    return std::make_pair(k, std::min(t, H));
  };
  auto heuristic = [&](const std::vector<NodeId>& pos, int mask) {
    long long h = 0;
    for (int i = 0; i < n; ++i)
      if (!(mask >> i & 1)) h += (*dist[i])[pos[i]];
    return h;
  };

  struct State {
    std::vector<NodeId> pos;
    int mask, t;
    long long gcost;
  };
  using QEntry = std::pair<long long, size_t>;  // (f, state idx)
  std::vector<State> states;
  std::priority_queue<QEntry, std::vector<QEntry>, std::greater<>> open;
  std::map<std::pair<uint64_t, int>, long long> best;

  auto push = [&](State s) {
    const auto k = key_of(s.pos, s.mask, s.t);
    auto it = best.find(k);
    if (it != best.end() && it->second <= s.gcost) return;
    best[k] = s.gcost;
    const long long f = s.gcost + heuristic(s.pos, s.mask);
    states.push_back(std::move(s));
    open.push({f, states.size() - 1});
  };

  State init{ins.starts, 0, 0, 0};
  push(init);

  while (!open.empty()) {
    const auto [f, idx] = open.top();
    open.pop();
    State s = states[idx];
    const auto k = key_of(s.pos, s.mask, s.t);
    auto it = best.find(k);
    if (it == best.end() || it->second < s.gcost) continue;

    if (s.mask == full) return s.gcost;
    if (s.t > time_cap) continue;

    // epsilon transition: commit one agent standing on its goal
    for (int i = 0; i < n; ++i) {
      if (s.mask >> i & 1 || s.pos[i] != ins.goals[i]) continue;
      if (obstacles) {
        const int lo = obstacles->last_occupancy(ins.goals[i]);
        if (lo == mapf::kForever || lo > s.t) continue;  // goal used later
      }
      State c = s;
      c.mask |= 1 << i;
      push(std::move(c));
    }

    // joint move: every uncommitted agent picks stay or a neighbor
    const long long movers = n - __builtin_popcount(static_cast<unsigned>(s.mask));
    std::vector<NodeId> nxt(s.pos);
    auto gen = [&](auto&& self, int i) -> void {
      if (i == n) {
        State c{nxt, s.mask, s.t + 1, s.gcost + movers};
        push(std::move(c));
        return;
      }
      if (s.mask >> i & 1) {
        nxt[i] = s.pos[i];
        self(self, i + 1);
        return;
      }
      auto try_to = [&](NodeId v) {
        if (obstacles) {
          if (obstacles->occupied(v, s.t + 1)) return;
          if (v != s.pos[i] && obstacles->swap_blocked(s.pos[i], v, s.t)) return;
        }
        for (int j = 0; j < i; ++j) {
          if (nxt[j] == v) return;  // vertex
          if (nxt[j] == s.pos[i] && s.pos[j] == v) return;  // swap
        }
        for (int j = i + 1; j < n; ++j)
          if (s.mask >> j & 1 && s.pos[j] == v) return;  // committed agents never move
        nxt[i] = v;
        self(self, i + 1);
      };
      try_to(s.pos[i]);
      for (const NodeId v : g.neighbors(s.pos[i])) try_to(v);
    };
    gen(gen, 0);
  }
  return -1;  // unsolvable within the cap
}

// minimal settle cost of a single timed path from start to goal that avoids
// the given paths, by exhaustive search over timed paths up to max_len moves
inline int brute_force_best_path(const Graph& g, NodeId start, NodeId goal,
                                 const std::vector<Path>& others, int max_len) {
  int best = mapf::kUnreachable;
  Path cur{start};
  auto conflict_free_prefix = [&](int t) {
    const NodeId v = cur[t];
    for (const auto& o : others) {
      if (mapf::position(o, t) == v) return false;
      if (t > 0 && mapf::position(o, t) == cur[t - 1] && mapf::position(o, t - 1) == v &&
          cur[t - 1] != v)
        return false;
    }
    return true;
  };
  auto settled_ok = [&](int t) {
    // parked at goal from t on; no other path may touch the goal later
    for (const auto& o : others) {
      if (!o.empty() && o.back() == goal) return false;
      for (int tt = t; tt < static_cast<int>(o.size()); ++tt)
        if (o[tt] == goal) return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, int t) -> void {
    if (static_cast<int>(cur.size()) - 1 >= best) return;  // can't improve
    const NodeId v = cur.back();
    if (v == goal && settled_ok(t)) {
      best = std::min(best, t);
      return;
    }
    if (t == max_len) return;
    auto step = [&](NodeId u) {
      cur.push_back(u);
      if (conflict_free_prefix(t + 1)) self(self, t + 1);
      cur.pop_back();
    };
    step(v);
    for (const NodeId u : g.neighbors(v)) step(u);
  };
  if (conflict_free_prefix(0)) rec(rec, 0);
  return best;
}

}  // namespace oracle
