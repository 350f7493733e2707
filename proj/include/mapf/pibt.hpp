#pragma once

#include <algorithm>
#include <vector>

#include "mapf/plan.hpp"

namespace mapf {

// Priority Inheritance with Backtracking: plans all agents one timestep at a
// time. Per step, agents act in dynamic priority order (steps since the agent
// last sat on its goal, ties by agent index). An agent demanding an occupied
// node lends its priority to the occupant, which must vacate or report
// failure (then the demander tries its next candidate). Returns a conflict-
// free partial plan of exactly `horizon` steps, stopping early only when all
// agents sit on their goals.
inline Solution pibt(const Instance& ins, int horizon) {
  const Graph& g = *ins.graph;
  const int n = ins.n();

  std::vector<NodeId> loc(ins.starts);
  std::vector<int> elapsed(n, 0);
  std::vector<NodeId> next(n, -1);
  std::vector<int> agent_at(g.node_count(), -1);   // current occupancy
  std::vector<int> claimed_by(g.node_count(), -1); // next-step reservations
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  Solution sol;
  sol.paths.assign(n, {});
  for (int i = 0; i < n; ++i) {
    sol.paths[i].reserve(horizon + 1);
    sol.paths[i].push_back(loc[i]);
    agent_at[loc[i]] = i;
  }

  std::vector<NodeId> cand;
  // returns true iff agent i secured a move; pusher >= 0 is the agent whose
  // demand caused this call (its current node is swap-forbidden)
  auto plan_agent = [&](auto&& self, int i, int pusher) -> bool {
    const auto& dist = g.distance_table(ins.goals[i]).dist;
    cand.clear();
    cand.push_back(loc[i]);
    for (const NodeId u : g.neighbors(loc[i])) cand.push_back(u);
    std::sort(cand.begin(), cand.end(), [&](NodeId a, NodeId b) {
      const int da = dist[a] == kUnreachable ? std::numeric_limits<int>::max() : dist[a];
      const int db = dist[b] == kUnreachable ? std::numeric_limits<int>::max() : dist[b];
      return da != db ? da < db : a < b;
    });
    std::vector<NodeId> local(cand);
    for (const NodeId v : local) {
      if (claimed_by[v] >= 0) continue;
      if (pusher >= 0 && v == loc[pusher]) continue;  // no swap with the pusher
      claimed_by[v] = i;
      next[i] = v;
      const int occupant = agent_at[v];
      if (occupant >= 0 && occupant != i && next[occupant] < 0) {
        if (!self(self, occupant, i)) {
          // occupant is stuck and now owns the claim on v; retract ours
          if (claimed_by[v] == i) claimed_by[v] = -1;
          next[i] = -1;
          continue;
        }
      }
      return true;
    }
    // nowhere to go: stay put even if someone claimed this node; the
    // claimant retracts on our failure
    next[i] = loc[i];
    claimed_by[loc[i]] = i;
    return false;
  };

  for (int t = 0; t < horizon; ++t) {
    bool all_home = true;
    for (int i = 0; i < n; ++i)
      if (loc[i] != ins.goals[i]) {
        all_home = false;
        break;
      }
    if (all_home) break;

    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (elapsed[a] != elapsed[b]) return elapsed[a] > elapsed[b];
      return a < b;
    });
    std::fill(next.begin(), next.end(), -1);
    std::fill(claimed_by.begin(), claimed_by.end(), -1);
    for (const int i : order)
      if (next[i] < 0) plan_agent(plan_agent, i, -1);

    for (int i = 0; i < n; ++i) agent_at[loc[i]] = -1;
    for (int i = 0; i < n; ++i) {
      loc[i] = next[i];
      agent_at[loc[i]] = i;
      sol.paths[i].push_back(loc[i]);
      elapsed[i] = loc[i] == ins.goals[i] ? 0 : elapsed[i] + 1;
    }
  }
  return sol;
}

}  // namespace mapf
