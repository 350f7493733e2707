#pragma once

#include <istream>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "mapf/graph.hpp"
#include "mapf/rng.hpp"

namespace mapf {

// Agents a_0..a_{n-1} with distinct starts and distinct goals on a shared
// graph. Immutable after construction.
struct Instance {
  const Graph* graph = nullptr;
  std::vector<NodeId> starts;
  std::vector<NodeId> goals;

  int n() const { return static_cast<int>(starts.size()); }

  // Σ_i dist(start_i, goal_i), the sum-of-costs lower bound
  long long distance_lower_bound() const {
    long long sum = 0;
    for (int i = 0; i < n(); ++i) sum += graph->dist(starts[i], goals[i]);
    return sum;
  }
};

namespace detail {

inline void check_instance(const Instance& ins) {
  std::unordered_set<NodeId> seen;
  for (int i = 0; i < ins.n(); ++i) {
    if (!seen.insert(ins.starts[i]).second)
      throw ParseError("duplicate start for agent " + std::to_string(i));
  }
  seen.clear();
  for (int i = 0; i < ins.n(); ++i) {
    if (!seen.insert(ins.goals[i]).second)
      throw ParseError("duplicate goal for agent " + std::to_string(i));
  }
  if (ins.n() == 0) return;
  // every referenced node must live in one connected component
  const auto& table = ins.graph->distance_table(ins.starts[0]);
  for (int i = 0; i < ins.n(); ++i) {
    if (table.dist[ins.starts[i]] == kUnreachable || table.dist[ins.goals[i]] == kUnreachable)
      throw ParseError("agent " + std::to_string(i) + " not connected to the rest of the instance");
  }
}

}  // namespace detail

// MovingAI .scen version 1: header line "version 1", then per agent
// bucket map width height sx sy gx gy optimal-length. The optimal-length
// column is octile and ignored here. The first n entries become agents.
inline Instance parse_scen(std::istream& in, const Graph& grid, int n) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("scen: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("version", 0) != 0) throw ParseError("scen: missing 'version' header");

  Instance ins;
  ins.graph = &grid;
  int entry = 0;
  while (static_cast<int>(ins.starts.size()) < n && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++entry;
    std::istringstream ss(line);
    int bucket, w, h, sx, sy, gx, gy;
    std::string map_name;
    double opt;
    if (!(ss >> bucket >> map_name >> w >> h >> sx >> sy >> gx >> gy >> opt))
      throw ParseError("scen entry " + std::to_string(entry) + ": malformed line");
    if (w != grid.width() || h != grid.height())
      throw ParseError("scen entry " + std::to_string(entry) + ": map dimension mismatch");
    const NodeId s = grid.node_at(sx, sy);
    const NodeId g = grid.node_at(gx, gy);
    if (s < 0)
      throw ParseError("scen entry " + std::to_string(entry) + ": start on blocked cell");
    if (g < 0)
      throw ParseError("scen entry " + std::to_string(entry) + ": goal on blocked cell");
    ins.starts.push_back(s);
    ins.goals.push_back(g);
  }
  if (static_cast<int>(ins.starts.size()) < n)
    throw ParseError("scen: requested " + std::to_string(n) + " agents, file has " +
                     std::to_string(ins.starts.size()));
  detail::check_instance(ins);
  return ins;
}

// Internal plain-text instance format (docs/formats.md): a "map=<path>" line
// followed by one "sx sy gx gy" line per agent. The map line is consumed by
// the caller (see instance_map_path); this parses the remainder.
inline Instance parse_instance_text(std::istream& in, const Graph& grid) {
  Instance ins;
  ins.graph = &grid;
  std::string line;
  int entry = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || line.rfind("map=", 0) == 0) continue;
    ++entry;
    std::istringstream ss(line);
    int sx, sy, gx, gy;
    if (!(ss >> sx >> sy >> gx >> gy))
      throw ParseError("instance entry " + std::to_string(entry) + ": malformed line");
    const NodeId s = grid.node_at(sx, sy);
    const NodeId g = grid.node_at(gx, gy);
    if (s < 0) throw ParseError("instance entry " + std::to_string(entry) + ": start on blocked cell");
    if (g < 0) throw ParseError("instance entry " + std::to_string(entry) + ": goal on blocked cell");
    ins.starts.push_back(s);
    ins.goals.push_back(g);
  }
  detail::check_instance(ins);
  return ins;
}

inline std::string instance_map_path(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("map=", 0) == 0) return line.substr(4);
  }
  throw ParseError("instance file: missing map= line");
}

// Starts and goals are sampled without replacement from the largest connected
// component (the two sets may still intersect each other). Deterministic for
// a fixed seed.
inline Instance random_instance(const Graph& grid, int n, uint64_t seed) {
  // largest component, ties by smallest contained NodeId
  std::vector<int> comp(grid.node_count(), -1);
  std::vector<int> comp_size;
  for (NodeId v = 0; v < grid.node_count(); ++v) {
    if (comp[v] >= 0) continue;
    const int c = static_cast<int>(comp_size.size());
    int size = 0;
    std::queue<NodeId> q;
    q.push(v);
    comp[v] = c;
    while (!q.empty()) {
      const NodeId u = q.front();
      q.pop();
      ++size;
      for (const NodeId w : grid.neighbors(u))
        if (comp[w] < 0) {
          comp[w] = c;
          q.push(w);
        }
    }
    comp_size.push_back(size);
  }
  int best = 0;
  for (int c = 1; c < static_cast<int>(comp_size.size()); ++c)
    if (comp_size[c] > comp_size[best]) best = c;
  std::vector<NodeId> nodes;
  for (NodeId v = 0; v < grid.node_count(); ++v)
    if (comp[v] == best) nodes.push_back(v);

  if (n > static_cast<int>(nodes.size()))
    throw std::invalid_argument("random_instance: " + std::to_string(n) +
                                " agents exceed the " + std::to_string(nodes.size()) +
                                " usable nodes");
  Rng rng(seed);
  Instance ins;
  ins.graph = &grid;
  ins.starts = sample_without_replacement(nodes, n, rng);
  ins.goals = sample_without_replacement(nodes, n, rng);
  return ins;
}

// true iff every agent can reach its goal after deleting all other agents'
// starts and goals from the graph
inline bool is_well_formed(const Instance& ins) {
  std::vector<char> endpoint(ins.graph->node_count(), 0);
  for (int i = 0; i < ins.n(); ++i) endpoint[ins.starts[i]] = endpoint[ins.goals[i]] = 1;
  std::vector<int> stamp(ins.graph->node_count(), -1);
  std::queue<NodeId> q;
  for (int i = 0; i < ins.n(); ++i) {
    const NodeId s = ins.starts[i], g = ins.goals[i];
    if (s == g) continue;
    q = {};
    q.push(s);
    stamp[s] = i;
    bool found = false;
    while (!q.empty() && !found) {
      const NodeId v = q.front();
      q.pop();
      for (const NodeId u : ins.graph->neighbors(v)) {
        if (stamp[u] == i) continue;
        if (u == g) {
          found = true;
          break;
        }
        if (endpoint[u]) continue;  // someone else's start or goal
        stamp[u] = i;
        q.push(u);
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace mapf
