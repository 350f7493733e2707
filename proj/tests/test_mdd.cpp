#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "gadgets.hpp"
#include "mapf/mdd.hpp"
#include "oracles.hpp"

using namespace mapf;

namespace {

std::set<std::pair<int, NodeId>> vertex_set(const Mdd& m) {
  std::set<std::pair<int, NodeId>> out;
  for (int t = 0; t < static_cast<int>(m.layers.size()); ++t)
    for (NodeId v : m.layers[t]) out.insert({t, v});
  return out;
}

std::set<std::pair<int, NodeId>> visited_by_paths(const std::vector<Path>& paths) {
  std::set<std::pair<int, NodeId>> out;
  for (const auto& p : paths)
    for (int t = 0; t < static_cast<int>(p.size()); ++t) out.insert({t, p[t]});
  return out;
}

}  // namespace

TEST_CASE("fig. 3 walkthrough: build, prune, empty") {
  auto f = gadgets::fig_mdd();
  const auto& ins = f.instance;
  Mdd m = build_mdd(f.graph, ins.starts[0], ins.goals[0], 2);
  CHECK(m.contains(1, 3));  // (v4, 1)
  CHECK(vertex_set(m) == std::set<std::pair<int, NodeId>>{{0, 2}, {1, 3}, {2, 4}});

  const auto rep = prune_mdd(m, f.seed_solution.paths[1]);
  CHECK(rep.changed);
  REQUIRE(rep.removed_conflict.size() == 1);
  CHECK(rep.removed_conflict[0] == TimedNode{1, 3});  // (v4, 1) collides with pi_2
  // then (v3, 0) and (v5, 2) become unreachable
  std::set<std::pair<int, NodeId>> cascade;
  for (const auto& tn : rep.removed_unreachable) cascade.insert({tn.t, tn.v});
  CHECK(cascade == std::set<std::pair<int, NodeId>>{{0, 2}, {2, 4}});
  CHECK(m.empty());
}

TEST_CASE("build_mdd: tight bound keeps only shortest-path nodes") {
  const Graph g = gadgets::open_grid(4, 4);
  const NodeId s = g.node_at(0, 0), t = g.node_at(3, 3);
  const Mdd m = build_mdd(g, s, t, g.dist(s, t));
  for (int layer = 0; layer < static_cast<int>(m.layers.size()); ++layer)
    for (NodeId v : m.layers[layer]) {
      CHECK(g.dist(s, v) == layer);  // no slack: every node sits on a shortest path
      CHECK(g.dist(s, v) + g.dist(v, t) == g.dist(s, t));
    }
}

TEST_CASE("build_mdd vertex set equals the path-enumeration oracle") {
  const Graph g = gadgets::open_grid(4, 4);
  Rng rng(3);
  for (int k = 0; k < 12; ++k) {
    const NodeId s = static_cast<NodeId>(rng_below(rng, g.node_count()));
    const NodeId t = static_cast<NodeId>(rng_below(rng, g.node_count()));
    const int c = g.dist(s, t) + static_cast<int>(rng_below(rng, 2));
    const Mdd m = build_mdd(g, s, t, c);
    const auto paths = oracle::enumerate_timed_paths(g, s, t, c);
    CHECK(vertex_set(m) == visited_by_paths(paths));
  }
}

TEST_CASE("prune_mdd: disjoint path leaves the MDD unchanged") {
  auto f = gadgets::fig_mdd();
  Mdd m = build_mdd(f.graph, f.instance.starts[0], f.instance.goals[0], 2);
  const Path far_away{5, 5, 5, 5};  // v6 never touches the MDD
  const auto rep = prune_mdd(m, far_away);
  CHECK_FALSE(rep.changed);
  CHECK(vertex_set(m) == std::set<std::pair<int, NodeId>>{{0, 2}, {1, 3}, {2, 4}});
}

TEST_CASE("prune_mdd removes swap-conflicting edges") {
  // straight corridor: a cost-2 path 0->1->2 against an opposing move 2->1
  const Graph g = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  Mdd m = build_mdd(g, 0, 2, 2);
  REQUIRE(m.has_edge(1, 1, 2));
  const Path opposing{2, 1, 1};  // moves 2->1 over [0,1]... and waits
  // the move 2->1 at t=0 does not block the MDD edge (1@0 -> 2@1)? it does:
  // my move 1->2 at t=1 would need their move 2->1 at t=1; theirs is at t=0.
  // the vertex conflict (1,1) is what bites here.
  const auto rep = prune_mdd(m, opposing);
  CHECK(rep.changed);
  CHECK(m.empty());

  // pure swap: the other agent moves 2->1 over [1,2] while staying clear of
  // the MDD's vertices otherwise: impossible on this gadget for vertices, so
  // craft it on a cycle where the vertex sets just touch via the edge.
  const Graph cyc = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  Mdd m2 = build_mdd(cyc, 0, 2, 2);  // two routes: 0-1-2 and 0-3-2
  REQUIRE(m2.contains(1, 1));
  REQUIRE(m2.contains(1, 3));
  const Path swapper{2, 1, 0, 0};  // occupies (1,1): vertex-prunes that branch
  const auto rep2 = prune_mdd(m2, swapper);
  CHECK(rep2.changed);
  CHECK_FALSE(m2.contains(1, 1));
  CHECK(m2.contains(1, 3));  // the 0-3-2 route survives
  CHECK_FALSE(m2.empty());
}

TEST_CASE("pruned MDD equals conflict-free path enumeration") {
  const Graph g = gadgets::open_grid(5, 5);
  Rng rng(17);
  int nontrivial = 0;
  for (int k = 0; k < 30; ++k) {
    const Instance ins = random_instance(g, 2, 1000 + k);
    const int c = g.dist(ins.starts[0], ins.goals[0]) + static_cast<int>(rng_below(rng, 2));
    // other agent walks a shortest path
    const int oc = g.dist(ins.starts[1], ins.goals[1]);
    const auto other_paths = oracle::enumerate_timed_paths(g, ins.starts[1], ins.goals[1], oc);
    REQUIRE_FALSE(other_paths.empty());
    const Path other = other_paths.front();

    Mdd m = build_mdd(g, ins.starts[0], ins.goals[0], c);
    const auto rep = prune_mdd(m, other);
    std::vector<Path> survivors;
    for (const auto& p : oracle::enumerate_timed_paths(g, ins.starts[0], ins.goals[0], c))
      if (!oracle::paths_conflict_within(p, other, c)) survivors.push_back(p);
    CHECK(vertex_set(m) == visited_by_paths(survivors));
    if (rep.changed) ++nontrivial;
  }
  CHECK(nontrivial > 0);
}

TEST_CASE("prune outcome is order-independent") {
  auto f = gadgets::fig_local_repair();
  const Graph& g = f.graph;
  Mdd a = build_mdd(g, 0, 4, 6);
  Mdd b = build_mdd(g, 0, 4, 6);
  const Path p1{1, 2, 5, 2, 2, 2, 2};
  const Path p2{6, 6, 3, 3, 3, 3, 3};
  prune_mdd(a, p1);
  prune_mdd(a, p2);
  prune_mdd(b, p2);
  prune_mdd(b, p1);
  CHECK(vertex_set(a) == vertex_set(b));
  // idempotent fixed point
  Mdd c = a;  // already pruned by both
  CHECK_FALSE(prune_mdd(c, p1).changed);
  CHECK_FALSE(prune_mdd(c, p2).changed);
}

TEST_CASE("every cost-c path embeds in the (c+1)-MDD with a trailing wait") {
  const Graph g = gadgets::open_grid(4, 4);
  const NodeId s = g.node_at(0, 0), t = g.node_at(2, 3);
  const int c = g.dist(s, t);
  const Mdd bigger = build_mdd(g, s, t, c + 1);
  for (const auto& p : oracle::enumerate_timed_paths(g, s, t, c)) {
    Path padded = p;
    padded.push_back(padded.back());
    for (int tt = 0; tt < static_cast<int>(padded.size()); ++tt)
      CHECK(bigger.contains(tt, padded[tt]));
    for (int tt = 0; tt + 1 < static_cast<int>(padded.size()); ++tt)
      CHECK(bigger.has_edge(tt, padded[tt], padded[tt + 1]));
  }
}
