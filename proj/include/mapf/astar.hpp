#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <queue>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mapf/plan.hpp"

namespace mapf {

using Clock = std::chrono::steady_clock;

// forbids one (agent, space-time) commitment
struct Constraint {
  enum class Kind { vertex, edge };
  int agent = 0;
  Kind kind = Kind::vertex;
  NodeId u = 0;  // vertex: the node; edge: move source
  NodeId v = 0;  // edge: move target
  int t = 0;     // vertex: occupancy time; edge: move over [t, t+1]
};

// one agent's view of its constraints, hashed for the low-level search
struct ConstraintSet {
  std::unordered_set<uint64_t> vertex;  // key(v, t)
  std::unordered_set<uint64_t> edge;    // key(u, t) ^ mix(v)
  int max_time = -1;                    // latest constrained timestep

  static uint64_t vkey(NodeId v, int t) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(v)) << 32) | static_cast<uint32_t>(t);
  }
  static uint64_t ekey(NodeId u, NodeId v, int t) {
    return vkey(u, t) * 0x9e3779b97f4a7c15ULL + static_cast<uint64_t>(static_cast<uint32_t>(v));
  }
  void add(const Constraint& c) {
    if (c.kind == Constraint::Kind::vertex)
      vertex.insert(vkey(c.u, c.t));
    else
      edge.insert(ekey(c.u, c.v, c.t));
    max_time = std::max(max_time, c.t);
  }
  bool forbids_vertex(NodeId v, int t) const {
    return !vertex.empty() && vertex.count(vkey(v, t)) > 0;
  }
  bool forbids_move(NodeId u, NodeId v, int t) const {
    return !edge.empty() && edge.count(ekey(u, v, t)) > 0;
  }
  // latest vertex constraint on v (for the settle test at the goal)
  int last_vertex_time(NodeId v) const {
    int last = -1;
    for (const uint64_t k : vertex)
      if (static_cast<NodeId>(k >> 32) == v)
        last = std::max(last, static_cast<int>(static_cast<uint32_t>(k)));
    return last;
  }
};

inline constexpr int kForever = std::numeric_limits<int>::max();

// The horizon-padded paths of agents outside the set being planned, indexed
// for O(1) conflict lookups. Agents park at their final locations forever
// after their paths end.
class FixedObstacles {
 public:
  FixedObstacles() = default;

  void add_path(const Path& raw) {
    const Path p = trimmed(raw);
    for (int t = 0; t < static_cast<int>(p.size()); ++t) vertex_.insert(ConstraintSet::vkey(p[t], t));
    for (int t = 0; t + 1 < static_cast<int>(p.size()); ++t)
      if (p[t] != p[t + 1]) edge_.insert(ConstraintSet::ekey(p[t], p[t + 1], t));
    const int settle = static_cast<int>(p.size()) - 1;
    auto [it, fresh] = parked_from_.emplace(p.back(), settle);
    if (!fresh) it->second = std::min(it->second, settle);
    for (int t = 0; t + 1 < static_cast<int>(p.size()); ++t) {
      auto [lit, lfresh] = last_seen_.emplace(p[t], t);
      if (!lfresh) lit->second = std::max(lit->second, t);
    }
    horizon_ = std::max(horizon_, settle);
  }

  static FixedObstacles from_solution(const Solution& s, const std::vector<char>& is_fixed) {
    FixedObstacles obs;
    for (size_t i = 0; i < s.paths.size(); ++i)
      if (is_fixed[i]) obs.add_path(s.paths[i]);
    return obs;
  }

  bool occupied(NodeId v, int t) const {
    if (!vertex_.empty() && vertex_.count(ConstraintSet::vkey(v, t))) return true;
    auto it = parked_from_.find(v);
    return it != parked_from_.end() && t >= it->second;
  }
  // true if some fixed agent moves to->from over [t, t+1] (swap with u->v)
  bool swap_blocked(NodeId from, NodeId to, int t) const {
    return !edge_.empty() && edge_.count(ConstraintSet::ekey(to, from, t)) > 0;
  }
  // latest time v is occupied; kForever when a fixed agent parks there
  int last_occupancy(NodeId v) const {
    if (parked_from_.count(v)) return kForever;
    auto it = last_seen_.find(v);
    return it == last_seen_.end() ? -1 : it->second;
  }
  int horizon() const { return horizon_; }
  bool empty() const { return vertex_.empty() && parked_from_.empty(); }

 private:
  std::unordered_set<uint64_t> vertex_;
  std::unordered_set<uint64_t> edge_;
  std::unordered_map<NodeId, int> parked_from_;
  std::unordered_map<NodeId, int> last_seen_;
  int horizon_ = 0;
};

enum class SearchStatus { found, infeasible, aborted };

struct PathResult {
  SearchStatus status = SearchStatus::infeasible;
  Path path;
};

// cooperative stop conditions, checked at node-expansion granularity
struct SearchLimits {
  std::optional<Clock::time_point> deadline;
  const std::atomic<bool>* stop = nullptr;
  uint64_t max_expansions = 0;  // 0 = unlimited

  bool interrupted() const {
    if (stop && stop->load(std::memory_order_relaxed)) return true;
    return deadline && Clock::now() >= *deadline;
  }
};

// Space-time A* for one agent: minimum settle-time path respecting the
// agent's constraints and avoiding the fixed obstacles (vertex and swap
// conflicts, parked-forever semantics). The search horizon is
// max(horizon_hint, obstacle horizon, last constraint) + |V| slack; no path
// within that bound means infeasible. Ties prefer smaller h, then later g,
// then smaller NodeId.
inline PathResult space_time_astar(const Graph& g, NodeId start, NodeId goal,
                                   const ConstraintSet& constraints, const FixedObstacles& obstacles,
                                   int horizon_hint, const SearchLimits& limits = {}) {
  const auto& h = g.distance_table(goal).dist;
  if (h[start] == kUnreachable) return {SearchStatus::infeasible, {}};
  if (obstacles.occupied(start, 0) || constraints.forbids_vertex(start, 0))
    return {SearchStatus::infeasible, {}};

  const int bound =
      std::max({horizon_hint, obstacles.horizon(), constraints.max_time + 1}) + g.node_count();
  // settling at time t requires no later occupancy or constraint at the goal
  const int goal_block = std::max(obstacles.last_occupancy(goal), constraints.last_vertex_time(goal));
  if (goal_block == kForever) return {SearchStatus::infeasible, {}};
  const int earliest_settle = goal_block + 1;

  struct Entry {
    int f, h, t;
    NodeId v;
  };
  struct Cmp {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.f != b.f) return a.f > b.f;
      if (a.h != b.h) return a.h > b.h;
      return a.v > b.v;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Cmp> open;
  std::unordered_map<uint64_t, uint64_t> parent;  // state key -> parent state key
  std::unordered_set<uint64_t> closed;
  auto key = [](NodeId v, int t) { return ConstraintSet::vkey(v, t); };

  open.push({h[start], h[start], 0, start});
  parent[key(start, 0)] = key(start, 0);
  uint64_t expansions = 0;

  while (!open.empty()) {
    const Entry cur = open.top();
    open.pop();
    const uint64_t cur_key = key(cur.v, cur.t);
    if (!closed.insert(cur_key).second) continue;

    if ((++expansions & 1023) == 0 && limits.interrupted()) return {SearchStatus::aborted, {}};
    if (limits.max_expansions && expansions > limits.max_expansions)
      return {SearchStatus::aborted, {}};

    if (cur.v == goal && cur.t >= earliest_settle) {
      Path path(cur.t + 1);
      uint64_t k = cur_key;
      for (int t = cur.t; t >= 0; --t) {
        path[t] = static_cast<NodeId>(k >> 32);
        k = parent.at(k);
      }
      return {SearchStatus::found, path};
    }
    if (cur.t >= bound) continue;

    auto try_move = [&](NodeId nxt) {
      const int nt = cur.t + 1;
      const uint64_t nkey = key(nxt, nt);
      if (closed.count(nkey) || parent.count(nkey)) return;
      if (constraints.forbids_vertex(nxt, nt)) return;
      if (nxt != cur.v && constraints.forbids_move(cur.v, nxt, cur.t)) return;
      if (obstacles.occupied(nxt, nt)) return;
      if (nxt != cur.v && obstacles.swap_blocked(cur.v, nxt, cur.t)) return;
      if (h[nxt] == kUnreachable) return;
      parent[nkey] = cur_key;
      open.push({nt + h[nxt], h[nxt], nt, nxt});
    };
    try_move(cur.v);
    for (const NodeId nxt : g.neighbors(cur.v)) try_move(nxt);
  }
  return {SearchStatus::infeasible, {}};
}

}  // namespace mapf
