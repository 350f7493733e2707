#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <set>

#include "mapf/icbs.hpp"

namespace mapf {

namespace detail {

inline long long focal_bound(double w, long long lb) {
  return static_cast<long long>(std::floor(w * static_cast<double>(lb) + 1e-9));
}

// occupancy view of the other agents' current paths, for conflict counting
struct ConflictCounter {
  std::unordered_map<uint64_t, int> vertex;  // (v, t) -> #agents
  std::unordered_map<uint64_t, int> edge;    // directed move (u->v, t) -> #agents
  std::unordered_map<NodeId, int> parked;    // node -> earliest settle among agents parked there
  int horizon = 0;

  void add_path(const Path& raw) {
    const Path p = trimmed(raw);
    for (int t = 0; t < static_cast<int>(p.size()); ++t) ++vertex[ConstraintSet::vkey(p[t], t)];
    for (int t = 0; t + 1 < static_cast<int>(p.size()); ++t)
      if (p[t] != p[t + 1]) ++edge[ConstraintSet::ekey(p[t], p[t + 1], t)];
    const int settle = static_cast<int>(p.size()) - 1;
    auto [it, fresh] = parked.emplace(p.back(), settle);
    if (!fresh) it->second = std::min(it->second, settle);
    horizon = std::max(horizon, settle);
  }
  int at(NodeId v, int t) const {
    int c = 0;
    auto it = vertex.find(ConstraintSet::vkey(v, t));
    if (it != vertex.end()) c += it->second;
    auto pk = parked.find(v);
    if (pk != parked.end() && t >= pk->second) ++c;
    return c;
  }
  int swaps(NodeId from, NodeId to, int t) const {
    auto it = edge.find(ConstraintSet::ekey(to, from, t));
    return it == edge.end() ? 0 : it->second;
  }
};

struct FocalPathResult {
  SearchStatus status = SearchStatus::infeasible;
  Path path;
  long long fmin = 0;  // admissible lower bound on the agent's optimal cost
};

// Bounded-suboptimal low level: expands, among open states with
// f <= w * fmin, the one with the fewest conflicts against the other
// agents' paths. Cost of the returned path is at most w * fmin.
inline FocalPathResult focal_astar(const Graph& g, NodeId start, NodeId goal,
                                   const ConstraintSet& constraints,
                                   const FixedObstacles& obstacles, const ConflictCounter& others,
                                   int horizon_hint, double w, const SearchLimits& limits) {
  const auto& h = g.distance_table(goal).dist;
  if (h[start] == kUnreachable) return {};
  if (obstacles.occupied(start, 0) || constraints.forbids_vertex(start, 0)) return {};
  const int bound =
      std::max({horizon_hint, obstacles.horizon(), others.horizon, constraints.max_time + 1}) +
      g.node_count();
  const int goal_block =
      std::max(obstacles.last_occupancy(goal), constraints.last_vertex_time(goal));
  if (goal_block == kForever) return {};
  const int earliest_settle = goal_block + 1;

  struct Info {
    int d = 0;
    uint64_t parent = 0;
    bool closed = false;
  };
  using FKey = std::tuple<int, int, NodeId, int>;     // f, h, v, t
  using DKey = std::tuple<int, int, NodeId, int>;     // d, f, v, t
  std::set<FKey> open;
  std::set<DKey> focal;
  std::unordered_map<uint64_t, Info> info;
  auto key = [](NodeId v, int t) { return ConstraintSet::vkey(v, t); };

  const int d0 = others.at(start, 0);
  open.insert({h[start], h[start], start, 0});
  focal.insert({d0, h[start], start, 0});
  info[key(start, 0)] = {d0, key(start, 0), false};
  int focal_f_bound = h[start];
  uint64_t expansions = 0;

  while (!open.empty()) {
    const int fmin = std::get<0>(*open.begin());
    const int fbound = static_cast<int>(focal_bound(w, fmin));
    if (fbound > focal_f_bound) {
      // admit newly eligible states, ordered by f
      for (auto it = open.upper_bound({focal_f_bound, std::numeric_limits<int>::max(),
                                       std::numeric_limits<NodeId>::max(),
                                       std::numeric_limits<int>::max()});
           it != open.end() && std::get<0>(*it) <= fbound; ++it) {
        const auto [f, hh, v, t] = *it;
        focal.insert({info[key(v, t)].d, f, v, t});
      }
      focal_f_bound = fbound;
    }
    const auto [d, f, v, t] = *focal.begin();
    focal.erase(focal.begin());
    const int hh = f - t;
    open.erase({f, hh, v, t});
    auto& me = info[key(v, t)];
    me.closed = true;

    if ((++expansions & 1023) == 0 && limits.interrupted()) return {SearchStatus::aborted, {}, 0};

    if (v == goal && t >= earliest_settle) {
      Path path(t + 1);
      uint64_t k = key(v, t);
      for (int tt = t; tt >= 0; --tt) {
        path[tt] = static_cast<NodeId>(k >> 32);
        k = info.at(k).parent;
      }
      return {SearchStatus::found, path, fmin};
    }
    if (t >= bound) continue;

    auto try_move = [&](NodeId nxt) {
      const int nt = t + 1;
      if (constraints.forbids_vertex(nxt, nt)) return;
      if (nxt != v && constraints.forbids_move(v, nxt, t)) return;
      if (obstacles.occupied(nxt, nt)) return;
      if (nxt != v && obstacles.swap_blocked(v, nxt, t)) return;
      if (h[nxt] == kUnreachable) return;
      const int nd = d + others.at(nxt, nt) + (nxt != v ? others.swaps(v, nxt, t) : 0);
      const uint64_t nkey = key(nxt, nt);
      auto it = info.find(nkey);
      const int nf = nt + h[nxt];
      if (it != info.end()) {
        if (it->second.closed || it->second.d <= nd) return;
        focal.erase({it->second.d, nf, nxt, nt});  // may be absent; set erase is safe
        it->second.d = nd;
        it->second.parent = key(v, t);
        if (nf <= focal_f_bound) focal.insert({nd, nf, nxt, nt});
        return;
      }
      info[nkey] = {nd, key(v, t), false};
      open.insert({nf, h[nxt], nxt, nt});
      if (nf <= focal_f_bound) focal.insert({nd, nf, nxt, nt});
    };
    try_move(v);
    for (const NodeId nxt : g.neighbors(v)) try_move(nxt);
  }
  return {};
}

struct EcbsNode {
  std::shared_ptr<const EcbsNode> parent;
  Constraint added{};
  std::vector<Path> paths;
  std::vector<long long> fmins;
  long long cost = 0, lb = 0;
  int conflicts = 0;
  uint64_t seq = 0;
};

}  // namespace detail

struct EcbsResult {
  SearchStatus status = SearchStatus::infeasible;  // found | aborted (timeout)
  Solution solution;
  long long lower_bound = 0;
};

// Enhanced CBS: focal search at both levels; the returned cost is at most
// w times the optimal sum-of-costs.
inline EcbsResult ecbs(const Instance& ins, double w, const IcbsLimits& limits = {}) {
  const Graph& g = *ins.graph;
  const int n = ins.n();
  const FixedObstacles no_obstacles;

  auto counter_without = [&](const std::vector<Path>& paths, int skip) {
    detail::ConflictCounter c;
    for (int j = 0; j < n; ++j)
      if (j != skip) c.add_path(paths[j]);
    return c;
  };

  auto root = std::make_shared<detail::EcbsNode>();
  root->paths.resize(n);
  root->fmins.resize(n);
  for (int i = 0; i < n; ++i) {
    detail::ConflictCounter empty_counter;
    auto res = detail::focal_astar(g, ins.starts[i], ins.goals[i], {}, no_obstacles, empty_counter,
                                   0, w, limits.low_level());
    if (res.status != SearchStatus::found) return {res.status, {}, 0};
    root->paths[i] = std::move(res.path);
    root->fmins[i] = res.fmin;
    root->cost += agent_cost(root->paths[i]);
    root->lb += res.fmin;
  }
  root->conflicts = detail::count_conflicts(root->paths);

  std::map<uint64_t, std::shared_ptr<detail::EcbsNode>> nodes;
  std::set<std::pair<long long, uint64_t>> open;     // (lb, seq)
  std::set<std::pair<long long, uint64_t>> by_cost;  // (cost, seq)
  std::set<std::tuple<int, long long, uint64_t>> focal;  // (conflicts, cost, seq)
  uint64_t seq = 0;
  long long focal_cost_bound = std::numeric_limits<long long>::min();

  auto push = [&](std::shared_ptr<detail::EcbsNode> node) {
    node->seq = ++seq;
    open.insert({node->lb, node->seq});
    by_cost.insert({node->cost, node->seq});
    if (node->cost <= focal_cost_bound) focal.insert({node->conflicts, node->cost, node->seq});
    nodes[node->seq] = std::move(node);
  };
  push(root);
  uint64_t expanded = 0;

  while (!open.empty()) {
    if (limits.interrupted()) return {SearchStatus::aborted, {}, 0};
    const long long lb_min = open.begin()->first;
    const long long bound = detail::focal_bound(w, lb_min);
    if (bound > focal_cost_bound) {
      for (auto it = by_cost.upper_bound({focal_cost_bound, std::numeric_limits<uint64_t>::max()});
           it != by_cost.end() && it->first <= bound; ++it)
        focal.insert({nodes[it->second]->conflicts, it->first, it->second});
      focal_cost_bound = bound;
    }
    const auto [nconf, ncost, nseq] = *focal.begin();
    focal.erase(focal.begin());
    auto node = nodes[nseq];
    nodes.erase(nseq);
    open.erase({node->lb, nseq});
    by_cost.erase({ncost, nseq});

    auto conflicts = detail::find_conflicts(node->paths, 1);
    if (conflicts.empty()) {
      Solution s;
      s.paths = node->paths;
      s.normalize();
      return {SearchStatus::found, std::move(s), lb_min};
    }
    ++expanded;
    if (limits.node_limit && expanded > limits.node_limit) return {SearchStatus::aborted, {}, 0};

    const ConflictReport& c = conflicts.front();
    for (int side = 0; side < 2; ++side) {
      const int i = side == 0 ? c.agent_a : c.agent_b;
      Constraint con;
      con.agent = i;
      if (c.kind == ConflictReport::Kind::vertex) {
        con.kind = Constraint::Kind::vertex;
        con.u = c.u;
        con.t = c.timestep;
      } else {
        con.kind = Constraint::Kind::edge;
        con.u = side == 0 ? c.u : c.v;
        con.v = side == 0 ? c.v : c.u;
        con.t = c.timestep;
      }
      auto child = std::make_shared<detail::EcbsNode>();
      child->parent = node;
      child->added = con;
      child->paths = node->paths;
      child->fmins = node->fmins;
      ConstraintSet cs;
      for (const detail::EcbsNode* p = child.get(); p && p->parent; p = p->parent.get())
        if (p->added.agent == i) cs.add(p->added);
      const auto counter = counter_without(child->paths, i);
      auto res = detail::focal_astar(g, ins.starts[i], ins.goals[i], cs, no_obstacles, counter,
                                     static_cast<int>(node->paths[i].size()) - 1, w,
                                     limits.low_level());
      if (res.status == SearchStatus::aborted) return {SearchStatus::aborted, {}, 0};
      if (res.status == SearchStatus::infeasible) continue;
      child->paths[i] = std::move(res.path);
      child->fmins[i] = res.fmin;
      child->cost = 0;
      child->lb = 0;
      for (int j = 0; j < n; ++j) {
        child->cost += agent_cost(child->paths[j]);
        child->lb += child->fmins[j];
      }
      child->conflicts = detail::count_conflicts(child->paths);
      push(std::move(child));
    }
  }
  return {};
}

}  // namespace mapf
