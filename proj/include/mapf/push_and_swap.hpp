#pragma once

#include <algorithm>
#include <deque>
#include <queue>
#include <vector>

#include "mapf/plan.hpp"

namespace mapf {

struct PushAndSwapResult {
  bool success = false;
  Solution solution;
};

namespace detail {

// Push and Swap on an explicit configuration: one agent moves per timestep.
// Agents are solved one at a time (farthest first); solved agents are locked
// at their goals. A blocked push escalates to the swap primitive at a
// degree>=3 vertex: the pair marches there (temporarily displacing anyone in
// the way), exchanges via two cleared neighbors, then the approach is
// replayed mirrored with the pair's roles exchanged, which restores every
// displaced bystander. Swapping past a solved agent unsolves it; it is
// re-solved right after. A move budget turns livelocks into honest failures.
class PushAndSwap {
 public:
  PushAndSwap(const Instance& ins, size_t max_moves)
      : ins_(ins), g_(*ins.graph), max_moves_(max_moves) {}

  bool run() {
    const int n = ins_.n();
    cur_ = ins_.starts;
    agent_at_.assign(g_.node_count(), -1);
    locked_.assign(g_.node_count(), 0);
    solved_.assign(n, 0);
    for (int i = 0; i < n; ++i) agent_at_[cur_[i]] = i;
    for (NodeId v = 0; v < g_.node_count(); ++v)
      if (g_.degree(v) >= 3) deg3_.push_back(v);

    // two empty vertices are required by the swap primitive
    if (g_.node_count() - n < 2 && cur_ != ins_.goals) return false;

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const int da = g_.dist(ins_.starts[a], ins_.goals[a]);
      const int db = g_.dist(ins_.starts[b], ins_.goals[b]);
      return da != db ? da > db : a < b;
    });

    for (const int a : order) {
      if (!solved_[a] && !solve(a)) return false;
      while (!pending_.empty()) {
        const int b = pending_.front();
        pending_.pop_front();
        if (!solved_[b] && !solve(b)) return false;
      }
    }
    return true;
  }

  Solution materialize() const {
    Solution s;
    const int n = ins_.n();
    s.paths.assign(n, {});
    std::vector<NodeId> pos(ins_.starts);
    for (int i = 0; i < n; ++i) s.paths[i].push_back(pos[i]);
    for (const auto& [agent, to] : log_) {
      pos[agent] = to;
      for (int i = 0; i < n; ++i) s.paths[i].push_back(pos[i]);
    }
    return s;
  }

 private:
  bool budget_ok() const { return log_.size() <= max_moves_; }

  void move(int agent, NodeId to) {
    agent_at_[cur_[agent]] = -1;
    cur_[agent] = to;
    agent_at_[to] = agent;
    log_.push_back({agent, to});
  }

  // BFS path from -> to; avoid[] nodes are impassable (from/to exempt)
  Path bfs_path(NodeId from, NodeId to, const std::vector<char>& avoid) const {
    if (from == to) return {from};
    std::vector<int> prev(g_.node_count(), -2);
    prev[from] = -1;
    std::queue<NodeId> q;
    q.push(from);
    while (!q.empty()) {
      const NodeId v = q.front();
      q.pop();
      for (const NodeId u : g_.neighbors(v)) {
        if (prev[u] != -2) continue;
        if (u != to && avoid[u]) continue;
        prev[u] = v;
        if (u == to) {
          Path p;
          for (NodeId w = to; w != -1; w = prev[w]) p.push_back(w);
          std::reverse(p.begin(), p.end());
          return p;
        }
        q.push(u);
      }
    }
    return {};
  }

  // shift the occupant chain so that v becomes empty; blocked nodes must not
  // be entered or traversed
  bool clear_vertex(NodeId v, std::vector<char>& blocked, bool respect_locks) {
    if (agent_at_[v] < 0) return true;
    std::vector<int> prev(g_.node_count(), -2);
    prev[v] = -1;
    std::queue<NodeId> q;
    q.push(v);
    NodeId empty = -1;
    while (!q.empty() && empty < 0) {
      const NodeId x = q.front();
      q.pop();
      for (const NodeId u : g_.neighbors(x)) {
        if (prev[u] != -2 || blocked[u]) continue;
        if (respect_locks && locked_[u]) continue;
        prev[u] = x;
        if (agent_at_[u] < 0) {
          empty = u;
          break;
        }
        q.push(u);
      }
    }
    if (empty < 0) return false;
    Path chain;
    for (NodeId w = empty; w != -1; w = prev[w]) chain.push_back(w);
    std::reverse(chain.begin(), chain.end());  // v ... empty
    for (int k = static_cast<int>(chain.size()) - 2; k >= 0; --k)
      move(agent_at_[chain[k]], chain[k + 1]);
    return budget_ok();
  }

  // the six-move exchange at swap vertex s: leader on s, follower adjacent,
  // n1/n2 empty neighbors of s
  void primitive(int leader, int follower, NodeId s, NodeId n0, NodeId n1, NodeId n2) {
    move(leader, n1);
    move(follower, s);
    move(follower, n2);
    move(leader, s);
    move(leader, n0);
    move(follower, s);
  }

  bool try_swap_at(int a, int b, NodeId s) {
    const size_t seg_start = log_.size();
    int leader = a, follower = b;
    const std::vector<char> no_avoid(g_.node_count(), 0);
    if (cur_[b] == s) {
      leader = b;
      follower = a;
    } else if (cur_[a] != s) {
      const Path p0 = bfs_path(cur_[a], s, no_avoid);
      if (p0.size() < 2) return false;
      if (p0[1] == cur_[b]) {
        leader = b;
        follower = a;
      }
    }
    // march the pair until the leader stands on s
    while (cur_[leader] != s) {
      if (!budget_ok()) return false;
      const Path p = bfs_path(cur_[leader], s, no_avoid);
      if (p.size() < 2) return false;
      const NodeId nxt = p[1];
      if (nxt == cur_[follower]) return false;  // geometry forces a turnaround
      if (agent_at_[nxt] >= 0) {
        std::vector<char> blocked(g_.node_count(), 0);
        blocked[cur_[leader]] = blocked[cur_[follower]] = 1;
        if (!clear_vertex(nxt, blocked, false)) return false;
      }
      const NodeId prev_leader = cur_[leader];
      move(leader, nxt);
      move(follower, prev_leader);
    }
    const NodeId n0 = cur_[follower];

    // two empty neighbors of s besides the follower's node
    std::vector<NodeId> empties;
    std::vector<char> blocked(g_.node_count(), 0);
    blocked[s] = blocked[n0] = 1;
    for (const NodeId nb : g_.neighbors(s)) {
      if (nb == n0) continue;
      if (agent_at_[nb] < 0) {
        empties.push_back(nb);
        blocked[nb] = 1;
        if (empties.size() == 2) break;
      }
    }
    for (const NodeId nb : g_.neighbors(s)) {
      if (empties.size() == 2) break;
      if (nb == n0 || blocked[nb]) continue;
      if (clear_vertex(nb, blocked, false) && agent_at_[nb] < 0) {
        empties.push_back(nb);
        blocked[nb] = 1;
      }
      if (!budget_ok()) return false;
    }
    if (empties.size() < 2) return false;

    const size_t pre_primitive = log_.size();
    primitive(leader, follower, s, n0, empties[0], empties[1]);

    // Mirror the approach (march + clearing) with the pair's roles
    // exchanged. The primitive leaves exactly the pre-primitive configuration
    // with leader and follower transposed, so the mirror walks the swapped
    // pair home and restores every displaced bystander.
    std::vector<NodeId> pos(ins_.starts);
    for (size_t k = 0; k < seg_start; ++k) pos[log_[k].first] = log_[k].second;
    std::vector<std::pair<int, NodeId>> sources;  // (agent, move source)
    sources.reserve(pre_primitive - seg_start);
    for (size_t k = seg_start; k < pre_primitive; ++k) {
      sources.push_back({log_[k].first, pos[log_[k].first]});
      pos[log_[k].first] = log_[k].second;
    }
    for (int k = static_cast<int>(sources.size()) - 1; k >= 0; --k) {
      const int agent = sources[k].first;
      move(agent == a ? b : (agent == b ? a : agent), sources[k].second);
    }
    return budget_ok();
  }

  bool try_swap(int a, int b) {
    // nearest swap vertices first
    const DistanceTable table = g_.bfs_from(cur_[a]);
    const auto& dist = table.dist;
    std::vector<NodeId> cands;
    for (const NodeId s : deg3_)
      if (dist[s] != kUnreachable) cands.push_back(s);
    std::sort(cands.begin(), cands.end(), [&](NodeId x, NodeId y) {
      return dist[x] != dist[y] ? dist[x] < dist[y] : x < y;
    });
    for (const NodeId s : cands) {
      if (!budget_ok()) return false;
      const auto snap_cur = cur_;
      const auto snap_at = agent_at_;
      const size_t snap_log = log_.size();
      if (try_swap_at(a, b, s)) return true;
      cur_ = snap_cur;
      agent_at_ = snap_at;
      log_.resize(snap_log);
    }
    return false;
  }

  bool solve(int a) {
    while (cur_[a] != ins_.goals[a]) {
      if (!budget_ok()) return false;
      std::vector<char> avoid(locked_);
      avoid[ins_.goals[a]] = 0;
      Path p = bfs_path(cur_[a], ins_.goals[a], avoid);
      if (p.size() < 2) {
        std::vector<char> none(g_.node_count(), 0);
        p = bfs_path(cur_[a], ins_.goals[a], none);
        if (p.size() < 2) return false;  // disconnected
      }
      const NodeId v = p[1];
      const int b = agent_at_[v];
      if (b < 0) {
        move(a, v);
        continue;
      }
      if (!solved_[b]) {
        std::vector<char> blocked(locked_);
        blocked[cur_[a]] = 1;
        if (clear_vertex(v, blocked, true)) {
          if (!budget_ok()) return false;
          move(a, v);
          continue;
        }
      }
      if (!try_swap(a, b)) return false;
      if (solved_[b]) {
        solved_[b] = 0;
        locked_[ins_.goals[b]] = 0;
        pending_.push_back(b);
      }
    }
    solved_[a] = 1;
    locked_[ins_.goals[a]] = 1;
    return true;
  }

  const Instance& ins_;
  const Graph& g_;
  size_t max_moves_;
  std::vector<NodeId> cur_;
  std::vector<int> agent_at_;
  std::vector<char> locked_, solved_;
  std::vector<NodeId> deg3_;
  std::deque<int> pending_;
  std::vector<std::pair<int, NodeId>> log_;  // (agent, destination) per timestep
};

}  // namespace detail

// Rule-based complete solver: push toward goals, swap at degree>=3 vertices
// when blocked. At most one agent moves per timestep. Fails honestly when no
// usable swap vertex exists or the primitives dead-end.
inline PushAndSwapResult push_and_swap(const Instance& ins, size_t max_moves = 0) {
  if (max_moves == 0)
    max_moves = 10000 + 20 * static_cast<size_t>(ins.graph->node_count()) +
                100 * static_cast<size_t>(ins.n());
  detail::PushAndSwap solver(ins, max_moves);
  PushAndSwapResult res;
  if (!solver.run()) return res;
  res.success = true;
  res.solution = solver.materialize();
  res.solution.normalize();
  return res;
}

}  // namespace mapf
