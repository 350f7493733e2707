#pragma once

// The small hand-built graphs used throughout the tests, constructed with
// the adjacency-list constructor. Node names follow the v1..v7 labels used
// in the test comments (v_k maps to NodeId k-1).

#include "mapf/plan.hpp"

namespace gadgets {

struct Fixture {
  mapf::Graph graph;
  mapf::Instance instance;
  mapf::Solution seed_solution;
};

// Two agents on a cycle with a short side pocket. a1 sits one edge from its
// goal across the top (v4 -> v3 -> v2 -> v1 counterclockwise, or a long
// k-edge chain clockwise); a2's goal v2 is on the short route, so the seeded
// solution sends a1 the long way (cost k) and a2 one step (cost 1). The
// optimum (6) needs both agents to move: a2 dodges into the pocket v5.
inline Fixture fig_local_minimum(int k) {
  // v1..v5 = 0..4, chain u_1..u_{k-1} = 5..(k+3)
  std::vector<std::pair<mapf::NodeId, mapf::NodeId>> edges = {
      {0, 1}, {1, 2}, {2, 3}, {1, 4}};
  const int chain = k - 1;
  for (int i = 0; i < chain; ++i) {
    const mapf::NodeId u = 5 + i;
    edges.push_back({i == 0 ? 3 : u - 1, u});
  }
  edges.push_back({chain > 0 ? 4 + chain : 3, 0});
  Fixture f{mapf::Graph::from_edges(5 + chain, edges), {}, {}};
  f.instance.graph = &f.graph;
  f.instance.starts = {3, 2};  // a1 at v4, a2 at v3
  f.instance.goals = {0, 1};   // a1 -> v1, a2 -> v2

  mapf::Path clockwise{3};
  for (int i = 0; i < chain; ++i) clockwise.push_back(5 + i);
  clockwise.push_back(0);
  f.seed_solution.paths = {clockwise, {2, 1}};
  f.seed_solution.normalize();
  return f;
}

// Row v1-v2-v3-v4-v5 with a top detour v2-v6-v7-v4 and the extra edge v3-v6.
// a1: v2 -> v3, a2: v1 -> v5.
inline Fixture fig_local_repair() {
  Fixture f{mapf::Graph::from_edges(
                7, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {1, 5}, {5, 6}, {6, 3}, {2, 5}}),
            {}, {}};
  f.instance.graph = &f.graph;
  f.instance.starts = {1, 0};
  f.instance.goals = {2, 4};
  // pi_1 = (v2, v3, v6, v3, v3), pi_2 = (v1, v2, v3, v4, v5)
  f.seed_solution.paths = {{1, 2, 5, 2, 2}, {0, 1, 2, 3, 4}};
  f.seed_solution.normalize();
  return f;
}

// The MDD example: v3-v4-v5 in a row, v4 also adjacent to v2 and v7, v2-v1,
// v7-v6. a1: v3 -> v5 (distance 2, so v4 at t=1 is its only shortest-path
// midpoint); a2: v7 -> v1 straight through v4 and v2.
inline Fixture fig_mdd() {
  Fixture f{mapf::Graph::from_edges(7, {{0, 1}, {1, 3}, {2, 3}, {3, 4}, {3, 6}, {5, 6}}), {}, {}};
  f.instance.graph = &f.graph;
  f.instance.starts = {2, 6};
  f.instance.goals = {4, 0};
  // pi_1 = (v3, v3, v4, v5), pi_2 = (v7, v4, v2, v1)
  f.seed_solution.paths = {{2, 2, 3, 4}, {6, 3, 1, 0}};
  f.seed_solution.normalize();
  return f;
}

// open W x H grid
inline mapf::Graph open_grid(int w, int h) {
  return mapf::Graph::from_grid(w, h, std::vector<char>(w * h, 1));
}

}  // namespace gadgets
