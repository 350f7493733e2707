#pragma once

#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "mapf/instance.hpp"

namespace mapf {

// locations indexed by timestep; an agent parks at its final location forever
using Path = std::vector<NodeId>;

// position with parked-at-end semantics
inline NodeId position(const Path& p, int t) {
  if (t < 0) t = 0;
  return t < static_cast<int>(p.size()) ? p[t] : p.back();
}

// earliest timestep after which the path never leaves its final location
inline int agent_cost(const Path& p) {
  const NodeId goal = p.back();
  for (int t = static_cast<int>(p.size()) - 1; t >= 0; --t)
    if (p[t] != goal) return t + 1;
  return 0;
}

// path truncated right after it settles (drops redundant tail waits)
inline Path trimmed(const Path& p) {
  return Path(p.begin(), p.begin() + agent_cost(p) + 1);
}

struct Solution {
  std::vector<Path> paths;

  int horizon() const {
    int h = 0;
    for (const auto& p : paths) h = std::max(h, static_cast<int>(p.size()) - 1);
    return h;
  }
  // pad every path to the common horizon by repeating its final location
  void normalize() {
    const int len = horizon() + 1;
    for (auto& p : paths)
      while (static_cast<int>(p.size()) < len) p.push_back(p.back());
  }
};

inline long long sum_of_costs(const Solution& s) {
  long long sum = 0;
  for (const auto& p : s.paths) sum += agent_cost(p);
  return sum;
}

struct ConflictReport {
  enum class Kind { vertex, swap };
  Kind kind;
  int agent_a = 0, agent_b = 0;
  int timestep = 0;     // for swap: the move over [timestep, timestep+1]
  NodeId u = 0, v = 0;  // vertex: u only; swap: the exchanged pair
};

struct ValidationResult {
  std::vector<std::string> structural;  // wrong endpoints, illegal moves, ...
  std::vector<ConflictReport> conflicts;
  bool ok() const { return structural.empty() && conflicts.empty(); }
};

// Full validity check: endpoints, move legality, vertex and swap conflicts.
// Agents are treated as parked at their final locations beyond their path
// ends. When `partial` is set, goal arrival is not required (PIBT prefixes).
inline ValidationResult validate(const Instance& ins, const Solution& s, bool partial = false) {
  ValidationResult res;
  if (static_cast<int>(s.paths.size()) != ins.n()) {
    res.structural.push_back("path count " + std::to_string(s.paths.size()) +
                             " != agent count " + std::to_string(ins.n()));
    return res;
  }
  const Graph& g = *ins.graph;
  int T = 0;
  for (int i = 0; i < ins.n(); ++i) {
    const Path& p = s.paths[i];
    if (p.empty()) {
      res.structural.push_back("agent " + std::to_string(i) + ": empty path");
      return res;
    }
    if (p.front() != ins.starts[i])
      res.structural.push_back("agent " + std::to_string(i) + ": wrong start");
    if (!partial && p.back() != ins.goals[i])
      res.structural.push_back("agent " + std::to_string(i) + ": does not end at its goal");
    for (int t = 0; t + 1 < static_cast<int>(p.size()); ++t) {
      if (p[t] == p[t + 1]) continue;
      const auto& nbrs = g.neighbors(p[t]);
      if (!std::binary_search(nbrs.begin(), nbrs.end(), p[t + 1]))
        res.structural.push_back("agent " + std::to_string(i) + ": illegal move at t=" +
                                 std::to_string(t));
    }
    T = std::max(T, static_cast<int>(p.size()) - 1);
  }
  if (!res.structural.empty()) return res;

  std::unordered_map<NodeId, int> occ_now, occ_next;
  for (int i = 0; i < ins.n(); ++i) occ_now[position(s.paths[i], 0)] = i;
  if (occ_now.size() != s.paths.size()) {
    // rebuild pairwise to report the clash
    for (int i = 0; i < ins.n(); ++i)
      for (int j = i + 1; j < ins.n(); ++j)
        if (position(s.paths[i], 0) == position(s.paths[j], 0))
          res.conflicts.push_back({ConflictReport::Kind::vertex, i, j, 0,
                                   position(s.paths[i], 0), 0});
  }
  for (int t = 0; t < T; ++t) {
    occ_next.clear();
    for (int i = 0; i < ins.n(); ++i) {
      const NodeId v = position(s.paths[i], t + 1);
      auto [it, fresh] = occ_next.emplace(v, i);
      if (!fresh)
        res.conflicts.push_back({ConflictReport::Kind::vertex, it->second, i, t + 1, v, 0});
    }
    for (int i = 0; i < ins.n(); ++i) {
      const NodeId from = position(s.paths[i], t);
      const NodeId to = position(s.paths[i], t + 1);
      if (from == to) continue;
      auto it = occ_now.find(to);
      if (it != occ_now.end() && it->second != i &&
          position(s.paths[it->second], t + 1) == from) {
        if (it->second < i)  // report each swap once
          res.conflicts.push_back({ConflictReport::Kind::swap, it->second, i, t, to, from});
      }
    }
    std::swap(occ_now, occ_next);
  }
  return res;
}

namespace detail {

inline uint64_t vt_key(NodeId v, int t) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(v)) << 32) | static_cast<uint32_t>(t);
}

// occupancy index over trimmed paths; agents park at path ends forever
struct OccupancyIndex {
  std::unordered_map<uint64_t, int> at;             // (v, t) -> agent, t < path length
  std::unordered_map<NodeId, std::pair<int, int>> parked;  // node -> (agent, from_t)

  void insert(int agent, const Path& p) {
    for (int t = 0; t < static_cast<int>(p.size()); ++t) at[vt_key(p[t], t)] = agent;
    parked[p.back()] = {agent, static_cast<int>(p.size()) - 1};
  }
  void erase(int agent, const Path& p) {
    for (int t = 0; t < static_cast<int>(p.size()); ++t) at.erase(vt_key(p[t], t));
    auto it = parked.find(p.back());
    if (it != parked.end() && it->second.first == agent) parked.erase(it);
  }
  int who_at(NodeId v, int t) const {
    auto it = at.find(vt_key(v, t));
    if (it != at.end()) return it->second;
    auto pk = parked.find(v);
    if (pk != parked.end() && t >= pk->second.second) return pk->second.first;
    return -1;
  }
};

// candidate path for `self` against all other (trimmed) paths; self's
// entries must not be in the index
inline bool candidate_conflicts(const OccupancyIndex& occ, const std::vector<Path>& paths,
                                int self, const Path& cand) {
  for (int t = 0; t < static_cast<int>(cand.size()); ++t) {
    if (occ.who_at(cand[t], t) >= 0) return true;
    if (t + 1 < static_cast<int>(cand.size()) && cand[t + 1] != cand[t]) {
      const int j = occ.who_at(cand[t + 1], t);
      if (j >= 0 && position(paths[j], t + 1) == cand[t]) return true;
    }
  }
  // others moving through my final location after I settle
  const NodeId mine = cand.back();
  const int settled = static_cast<int>(cand.size()) - 1;
  for (int j = 0; j < static_cast<int>(paths.size()); ++j) {
    if (j == self) continue;
    for (int t = settled; t < static_cast<int>(paths[j].size()); ++t)
      if (paths[j][t] == mine) return true;
  }
  return false;
}

}  // namespace detail

// Greedy left-shift: repeatedly delete any wait whose removal keeps the
// solution conflict-free, until a fixed point. Move order per agent is
// preserved, so temporal dependencies between agents stay intact. Cost never
// increases.
inline Solution compress(const Instance& ins, const Solution& input) {
  Solution s = input;
  for (auto& p : s.paths) p = trimmed(p);
  detail::OccupancyIndex occ;
  for (int i = 0; i < ins.n(); ++i) occ.insert(i, s.paths[i]);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < ins.n(); ++i) {
      if (s.paths[i].size() < 2) continue;
      occ.erase(i, s.paths[i]);
      Path& p = s.paths[i];
      int t = 1;
      while (t < static_cast<int>(p.size())) {
        if (p[t] != p[t - 1]) {
          ++t;
          continue;
        }
        Path cand = p;
        cand.erase(cand.begin() + t);
        cand = trimmed(cand);
        if (!detail::candidate_conflicts(occ, s.paths, i, cand)) {
          p = std::move(cand);
          changed = true;
        } else {
          ++t;
        }
      }
      occ.insert(i, s.paths[i]);
    }
  }
  s.normalize();
  return s;
}

// Solution text format: one line per agent, comma-separated (x,y) per
// timestep (see docs/formats.md).
inline void write_solution(std::ostream& os, const Graph& g, const Solution& s) {
  for (const auto& p : s.paths) {
    for (size_t t = 0; t < p.size(); ++t) {
      const Cell c = g.cell(p[t]);
      if (t) os << ',';
      os << '(' << c.x << ',' << c.y << ')';
    }
    os << '\n';
  }
}

}  // namespace mapf
