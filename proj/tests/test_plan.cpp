#include <catch2/catch_amalgamated.hpp>

#include "gadgets.hpp"
#include "mapf/plan.hpp"
#include "mapf/push_and_swap.hpp"
#include "mapf/rng.hpp"
#include "oracles.hpp"

using namespace mapf;

TEST_CASE("agent_cost") {
  CHECK(agent_cost({7}) == 0);                 // starts settled
  CHECK(agent_cost({1, 2, 5, 2, 2}) == 3);     // revisits the goal at t=3 and stays
  CHECK(agent_cost({0, 1, 2, 3, 4}) == 4);     // arrives exactly at the end
  CHECK(agent_cost({3, 3, 3}) == 0);           // never moves
  CHECK(agent_cost({3, 4, 3, 3}) == 2);        // bounce then settle
}

TEST_CASE("sum_of_costs") {
  Solution s;
  s.paths = {{0}, {5}};
  CHECK(sum_of_costs(s) == 0);

  auto fig1 = gadgets::fig_local_minimum(6);
  CHECK(sum_of_costs(fig1.seed_solution) == 7);  // k + 1

  auto fig1b = gadgets::fig_local_minimum(20);
  CHECK(sum_of_costs(fig1b.seed_solution) == 21);
}

TEST_CASE("padding invariance") {
  auto fig2 = gadgets::fig_local_repair();
  Solution padded = fig2.seed_solution;
  for (auto& p : padded.paths)
    for (int k = 0; k < 5; ++k) p.push_back(p.back());
  CHECK(sum_of_costs(padded) == sum_of_costs(fig2.seed_solution));
  CHECK(validate(fig2.instance, padded).ok() ==
        validate(fig2.instance, fig2.seed_solution).ok());
}

TEST_CASE("validate catches conflicts") {
  const Graph g = gadgets::open_grid(4, 1);
  Instance ins;
  ins.graph = &g;
  ins.starts = {0, 3};
  ins.goals = {3, 0};

  Solution swap_sol;
  swap_sol.paths = {{0, 1, 2, 3}, {3, 2, 1, 0}};
  auto res = validate(ins, swap_sol);
  REQUIRE_FALSE(res.ok());
  REQUIRE_FALSE(res.conflicts.empty());
  bool has_swap = false;
  for (const auto& c : res.conflicts)
    if (c.kind == ConflictReport::Kind::swap) has_swap = true;
  CHECK(has_swap);

  Solution vertex_sol;
  vertex_sol.paths = {{0, 1, 2, 2, 3}, {3, 2, 1, 0, 0}};
  auto res2 = validate(ins, vertex_sol);
  bool has_vertex = false;
  for (const auto& c : res2.conflicts)
    if (c.kind == ConflictReport::Kind::vertex && c.timestep == 2) has_vertex = true;
  CHECK(has_vertex);
}

TEST_CASE("validate reports structural problems distinctly") {
  const Graph g = gadgets::open_grid(3, 3);
  Instance ins;
  ins.graph = &g;
  ins.starts = {g.node_at(0, 0)};
  ins.goals = {g.node_at(2, 2)};

  Solution wrong_goal;
  wrong_goal.paths = {{g.node_at(0, 0), g.node_at(1, 0)}};
  auto res = validate(ins, wrong_goal);
  CHECK_FALSE(res.structural.empty());
  CHECK(res.conflicts.empty());

  Solution teleport;
  teleport.paths = {{g.node_at(0, 0), g.node_at(2, 2)}};
  auto res2 = validate(ins, teleport);
  REQUIRE_FALSE(res2.structural.empty());
  CHECK(res2.structural[0].find("illegal move") != std::string::npos);
}

TEST_CASE("validate: parked agents conflict with late arrivals") {
  const Graph g = gadgets::open_grid(4, 1);
  Instance ins;
  ins.graph = &g;
  ins.starts = {1, 3};
  ins.goals = {0, 1};  // a2's goal is a1's start... a1 leaves, a2 arrives late
  Solution s;
  s.paths = {{1, 0}, {3, 2, 1}};
  CHECK(validate(ins, s).ok());

  // now a2 arrives while a1 still sits at node 1
  Solution bad;
  bad.paths = {{1, 1, 1, 0}, {3, 2, 1}};
  CHECK_FALSE(validate(ins, bad).ok());
}

TEST_CASE("compress: fixed point on already-tight paths") {
  const Graph g = gadgets::open_grid(5, 5);
  Instance ins;
  ins.graph = &g;
  ins.starts = {g.node_at(0, 0), g.node_at(4, 4)};
  ins.goals = {g.node_at(4, 0), g.node_at(0, 4)};
  Solution s;
  s.paths = {{g.node_at(0, 0), g.node_at(1, 0), g.node_at(2, 0), g.node_at(3, 0), g.node_at(4, 0)},
             {g.node_at(4, 4), g.node_at(3, 4), g.node_at(2, 4), g.node_at(1, 4), g.node_at(0, 4)}};
  const Solution c = compress(ins, s);
  CHECK(sum_of_costs(c) == sum_of_costs(s));
  CHECK(validate(ins, c).ok());
}

TEST_CASE("compress: sequential disjoint moves become concurrent") {
  const Graph g = gadgets::open_grid(3, 3);
  Instance ins;
  ins.graph = &g;
  ins.starts = {g.node_at(0, 0), g.node_at(0, 2)};
  ins.goals = {g.node_at(2, 0), g.node_at(2, 2)};
  // one agent moves at a time (push-and-swap style)
  Solution s;
  s.paths = {{g.node_at(0, 0), g.node_at(1, 0), g.node_at(2, 0), g.node_at(2, 0), g.node_at(2, 0)},
             {g.node_at(0, 2), g.node_at(0, 2), g.node_at(0, 2), g.node_at(1, 2), g.node_at(2, 2)}};
  const Solution c = compress(ins, s);
  CHECK(validate(ins, c).ok());
  CHECK(sum_of_costs(c) == 4);  // both run concurrently
}

TEST_CASE("compress never raises cost and preserves validity on PS output") {
  const Graph g = gadgets::open_grid(5, 5);
  int tested = 0;
  for (uint64_t seed = 0; tested < 100 && seed < 300; ++seed) {
    const Instance ins = random_instance(g, 6, seed);
    auto ps = push_and_swap(ins);
    if (!ps.success) continue;
    REQUIRE(validate(ins, ps.solution).ok());
    const Solution c = compress(ins, ps.solution);
    CHECK(validate(ins, c).ok());
    CHECK(sum_of_costs(c) <= sum_of_costs(ps.solution));
    ++tested;
  }
  CHECK(tested == 100);
}

TEST_CASE("solution text format") {
  const Graph g = gadgets::open_grid(2, 2);
  Solution s;
  s.paths = {{g.node_at(0, 0), g.node_at(1, 0)}};
  std::stringstream ss;
  write_solution(ss, g, s);
  CHECK(ss.str() == "(0,0),(1,0)\n");
}
