#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "mapf/astar.hpp"
#include "mapf/pibt.hpp"
#include "mapf/push_and_swap.hpp"

namespace mapf {

struct InitResult {
  bool success = false;
  Solution solution;
};

// farthest-first ordering, the default for prioritized planning
inline std::vector<int> distance_descending_order(const Instance& ins) {
  std::vector<int> order(ins.n());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const int da = ins.graph->dist(ins.starts[a], ins.goals[a]);
    const int db = ins.graph->dist(ins.starts[b], ins.goals[b]);
    return da != db ? da > db : a < b;
  });
  return order;
}

// Hybrid initial solver: run PIBT up to the largest start-goal distance; if
// stragglers remain, finish them with Push and Swap from the reached
// configuration and append the compressed suffix.
inline InitResult pibt_complete(const Instance& ins) {
  int horizon = 0;
  for (int i = 0; i < ins.n(); ++i)
    horizon = std::max(horizon, ins.graph->dist(ins.starts[i], ins.goals[i]));

  Solution prefix = pibt(ins, horizon);
  bool settled = true;
  for (int i = 0; i < ins.n(); ++i)
    if (prefix.paths[i].back() != ins.goals[i]) {
      settled = false;
      break;
    }
  if (settled) return {true, std::move(prefix)};

  Instance rest;
  rest.graph = ins.graph;
  rest.goals = ins.goals;
  rest.starts.resize(ins.n());
  for (int i = 0; i < ins.n(); ++i) rest.starts[i] = prefix.paths[i].back();
  auto ps = push_and_swap(rest);
  if (!ps.success) return {};

  Solution suffix = compress(rest, ps.solution);
  Solution full = std::move(prefix);
  for (int i = 0; i < ins.n(); ++i) {
    full.paths[i].pop_back();  // junction configuration appears once
    full.paths[i].insert(full.paths[i].end(), suffix.paths[i].begin(), suffix.paths[i].end());
  }
  full.normalize();
  return {true, std::move(full)};
}

// Prioritized planning: agents plan one after another with space-time A*,
// avoiding everything planned so far. Fails when some agent has no path
// under the accumulated reservations.
inline InitResult hca(const Instance& ins, const std::vector<int>& order) {
  InitResult res;
  res.solution.paths.assign(ins.n(), {});
  FixedObstacles reserved;
  int horizon_hint = 0;
  for (const int i : order) {
    auto p = space_time_astar(*ins.graph, ins.starts[i], ins.goals[i], {}, reserved, horizon_hint);
    if (p.status != SearchStatus::found) return {};
    horizon_hint = std::max(horizon_hint, static_cast<int>(p.path.size()) - 1);
    reserved.add_path(p.path);
    res.solution.paths[i] = std::move(p.path);
  }
  res.success = true;
  res.solution.normalize();
  return res;
}

inline InitResult hca(const Instance& ins) { return hca(ins, distance_descending_order(ins)); }

namespace detail {

// windowed reservation table (vertex + edge, within the window only)
struct WindowReservations {
  std::unordered_set<uint64_t> vertex, edge;
  void add(const Path& p) {
    for (int t = 0; t < static_cast<int>(p.size()); ++t) vertex.insert(ConstraintSet::vkey(p[t], t));
    for (int t = 0; t + 1 < static_cast<int>(p.size()); ++t)
      if (p[t] != p[t + 1]) edge.insert(ConstraintSet::ekey(p[t], p[t + 1], t));
  }
  bool blocked(NodeId v, int t) const { return vertex.count(ConstraintSet::vkey(v, t)) > 0; }
  bool swap(NodeId from, NodeId to, int t) const {
    return edge.count(ConstraintSet::ekey(to, from, t)) > 0;
  }
};

// best progress toward the goal within `window` steps: A* over (node, t)
// that may stop early only when settled at the goal through the window end
inline Path whca_segment(const Graph& g, NodeId start, NodeId goal, int window,
                         const WindowReservations& rsv) {
  const auto& h = g.distance_table(goal).dist;
  struct Entry {
    int f, h, t;
    NodeId v;
  };
  struct Cmp {
    bool operator()(const Entry& x, const Entry& y) const {
      if (x.f != y.f) return x.f > y.f;
      if (x.h != y.h) return x.h > y.h;
      return x.v > y.v;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Cmp> open;
  std::unordered_map<uint64_t, uint64_t> parent;
  std::unordered_set<uint64_t> closed;
  auto key = [](NodeId v, int t) { return ConstraintSet::vkey(v, t); };
  const int h0 = h[start] == kUnreachable ? g.node_count() : h[start];
  open.push({h0, h0, 0, start});
  parent[key(start, 0)] = key(start, 0);

  auto reconstruct = [&](NodeId v, int t) {
    Path path(t + 1);
    uint64_t k = key(v, t);
    for (int tt = t; tt >= 0; --tt) {
      path[tt] = static_cast<NodeId>(k >> 32);
      k = parent.at(k);
    }
    while (static_cast<int>(path.size()) <= window) path.push_back(path.back());
    return path;
  };

  while (!open.empty()) {
    const Entry cur = open.top();
    open.pop();
    const uint64_t ck = key(cur.v, cur.t);
    if (!closed.insert(ck).second) continue;
    if (cur.t == window) return reconstruct(cur.v, cur.t);
    if (cur.v == goal) {
      // settle through the window end if nothing blocks the goal
      bool free_tail = true;
      for (int t = cur.t + 1; t <= window && free_tail; ++t)
        if (rsv.blocked(goal, t)) free_tail = false;
      if (free_tail) return reconstruct(cur.v, cur.t);
    }
    auto try_move = [&](NodeId nxt) {
      const int nt = cur.t + 1;
      const uint64_t nk = key(nxt, nt);
      if (closed.count(nk) || parent.count(nk)) return;
      if (rsv.blocked(nxt, nt)) return;
      if (nxt != cur.v && rsv.swap(cur.v, nxt, cur.t)) return;
      parent[nk] = ck;
      const int hn = h[nxt] == kUnreachable ? g.node_count() : h[nxt];
      open.push({nt + hn, hn, nt, nxt});
    };
    try_move(cur.v);
    for (const NodeId nxt : g.neighbors(cur.v)) try_move(nxt);
  }
  return {};
}

}  // namespace detail

// Windowed HCA: repeatedly plan `window` cooperative steps (conflicts are
// only checked inside the window) until all agents rest on their goals.
// Fails, rather than hangs, when the window limit is exhausted; windowed
// lookahead is incomplete and can cycle.
inline InitResult whca(const Instance& ins, int window, int max_windows = 0) {
  if (window < 1) throw std::invalid_argument("whca: window must be >= 1");
  if (max_windows <= 0) max_windows = 4 * ins.graph->node_count();
  const Graph& g = *ins.graph;

  std::vector<NodeId> loc(ins.starts);
  Solution sol;
  sol.paths.assign(ins.n(), {});
  for (int i = 0; i < ins.n(); ++i) sol.paths[i].push_back(loc[i]);

  for (int round = 0; round < max_windows; ++round) {
    bool done = true;
    for (int i = 0; i < ins.n(); ++i)
      if (loc[i] != ins.goals[i]) {
        done = false;
        break;
      }
    if (done) {
      sol.normalize();
      return {true, std::move(sol)};
    }

    std::vector<int> order(ins.n());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const int da = g.dist(loc[a], ins.goals[a]);
      const int db = g.dist(loc[b], ins.goals[b]);
      return da != db ? da > db : a < b;
    });

    detail::WindowReservations rsv;
    std::vector<Path> segs(ins.n());
    for (const int i : order) {
      Path seg = detail::whca_segment(g, loc[i], ins.goals[i], window, rsv);
      if (seg.empty()) return {};  // boxed in within the window
      rsv.add(seg);
      segs[i] = std::move(seg);
    }
    for (int i = 0; i < ins.n(); ++i) {
      sol.paths[i].insert(sol.paths[i].end(), segs[i].begin() + 1, segs[i].end());
      loc[i] = sol.paths[i].back();
    }
  }
  return {};  // window limit reached
}

}  // namespace mapf
