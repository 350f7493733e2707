#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <thread>

#include "gadgets.hpp"
#include "mapf/graph.hpp"
#include "mapf/rng.hpp"
#include "oracles.hpp"

using namespace mapf;

namespace {
Graph grid_from(const std::string& body, int w, int h) {
  std::stringstream ss;
  ss << "type octile\nheight " << h << "\nwidth " << w << "\nmap\n" << body;
  return parse_map(ss);
}
}  // namespace

TEST_CASE("parse_map counts passable cells") {
  const Graph g = parse_map_file(std::string(MAPF_DATA_DIR) + "/maps/random-32-32-20.map");
  CHECK(g.width() == 32);
  CHECK(g.height() == 32);
  CHECK(g.node_count() == 819);

  CHECK(grid_from("...\n...\n...\n", 3, 3).node_count() == 9);
  CHECK(grid_from("..\n.@\n", 2, 2).node_count() == 3);
  CHECK(grid_from(".G\nT.\n", 2, 2).node_count() == 3);  // G passable, T blocked
}

TEST_CASE("parse_map errors name the line") {
  std::stringstream bad_header("type octile\nwidth 2\nheight 2\nmap\n..\n..\n");
  CHECK_THROWS_WITH(parse_map(bad_header), Catch::Matchers::ContainsSubstring("line 2"));

  std::stringstream short_row("type octile\nheight 2\nwidth 3\nmap\n...\n..\n");
  CHECK_THROWS_WITH(parse_map(short_row), Catch::Matchers::ContainsSubstring("line 6"));

  std::stringstream bad_glyph("type octile\nheight 1\nwidth 3\nmap\n.x.\n");
  CHECK_THROWS_WITH(parse_map(bad_glyph), Catch::Matchers::ContainsSubstring("glyph"));

  std::stringstream truncated("type octile\nheight 3\nwidth 2\nmap\n..\n..\n");
  CHECK_THROWS(parse_map(truncated));
}

TEST_CASE("node ids are row-major over passable cells") {
  const Graph g = grid_from(".@.\n...\n", 3, 2);
  CHECK(g.node_at(0, 0) == 0);
  CHECK(g.node_at(1, 0) == -1);
  CHECK(g.node_at(2, 0) == 1);
  CHECK(g.node_at(0, 1) == 2);
  CHECK(g.node_at(2, 1) == 4);
  CHECK(g.cell(4).x == 2);
  CHECK(g.cell(4).y == 1);
}

TEST_CASE("neighbors: degree and self-exclusion") {
  const Graph g = gadgets::open_grid(3, 3);
  const NodeId center = g.node_at(1, 1);
  CHECK(g.neighbors(center).size() == 4);
  const NodeId corner = g.node_at(0, 0);
  CHECK(g.neighbors(corner).size() == 2);
  for (NodeId v = 0; v < g.node_count(); ++v)
    for (NodeId u : g.neighbors(v)) CHECK(u != v);

  // isolated node
  const Graph iso = grid_from(".@.\n@.@\n.@.\n", 3, 3);
  CHECK(iso.neighbors(iso.node_at(1, 1)).empty());
}

TEST_CASE("dist matches a fresh BFS oracle") {
  const Graph g = parse_map_file(std::string(MAPF_DATA_DIR) + "/maps/random-32-32-20.map");
  Rng rng(7);
  for (int k = 0; k < 200; ++k) {
    const NodeId u = static_cast<NodeId>(rng_below(rng, g.node_count()));
    const NodeId v = static_cast<NodeId>(rng_below(rng, g.node_count()));
    CHECK(g.dist(u, v) == oracle::naive_bfs(g, u, v));
  }
  CHECK(g.dist(5, 5) == 0);

  const Graph open3 = gadgets::open_grid(3, 3);
  CHECK(open3.dist(open3.node_at(0, 0), open3.node_at(2, 2)) == 4);
}

TEST_CASE("dist properties: symmetry, triangle inequality, cache transparency") {
  const Graph g = parse_map_file(std::string(MAPF_DATA_DIR) + "/maps/random-32-32-10.map");
  Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    const NodeId a = static_cast<NodeId>(rng_below(rng, g.node_count()));
    const NodeId b = static_cast<NodeId>(rng_below(rng, g.node_count()));
    const NodeId c = static_cast<NodeId>(rng_below(rng, g.node_count()));
    CHECK(g.dist(a, b) == g.dist(b, a));
    if (g.dist(a, c) != kUnreachable && g.dist(c, b) != kUnreachable)
      CHECK(g.dist(a, b) <= g.dist(a, c) + g.dist(c, b));
    CHECK(g.dist(a, b) == oracle::naive_bfs(g, a, b));  // cached == uncached
  }
}

TEST_CASE("distance table invariants") {
  const Graph g = parse_map_file(std::string(MAPF_DATA_DIR) + "/maps/random-32-32-20.map");
  const auto& table = g.distance_table(100);
  CHECK(table.dist[100] == 0);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (table.dist[v] == kUnreachable) continue;
    for (NodeId u : g.neighbors(v)) {
      REQUIRE(table.dist[u] != kUnreachable);
      CHECK(std::abs(table.dist[u] - table.dist[v]) <= 1);
    }
  }
}

TEST_CASE("concurrent distance queries agree") {
  const Graph g = parse_map_file(std::string(MAPF_DATA_DIR) + "/maps/random-32-32-20.map");
  std::vector<int> results(8, -1);
  std::vector<std::thread> threads;
  for (int k = 0; k < 8; ++k)
    threads.emplace_back([&, k] { results[k] = g.dist(3, 500); });
  for (auto& t : threads) t.join();
  for (int k = 1; k < 8; ++k) CHECK(results[k] == results[0]);
  CHECK(results[0] == oracle::naive_bfs(g, 3, 500));
}
