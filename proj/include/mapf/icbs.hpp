#pragma once

#include <algorithm>
#include <cassert>
#include <memory>
#include <queue>
#include <vector>

#include "mapf/astar.hpp"
#include "mapf/mdd.hpp"

namespace mapf {

// MDD of horizon-c paths legal under the agent's constraints and the fixed
// obstacles; used for cardinal-conflict classification.
inline Mdd build_mdd_constrained(const Graph& g, NodeId start, NodeId goal, int c,
                                 const ConstraintSet& constraints, const FixedObstacles& obstacles) {
  Mdd m;
  m.start = start;
  m.goal = goal;
  m.cost_bound = c;
  const auto& to_goal = g.distance_table(goal).dist;
  if (to_goal[start] == kUnreachable || to_goal[start] > c) return m;
  if (obstacles.occupied(start, 0) || constraints.forbids_vertex(start, 0)) return m;

  m.layers.resize(c + 1);
  m.edges.resize(c);
  m.layers[0] = {start};
  for (int t = 0; t < c; ++t) {
    std::vector<NodeId> next;
    auto try_move = [&](NodeId u, NodeId v) {
      if (to_goal[v] == kUnreachable || t + 1 + to_goal[v] > c) return;
      if (constraints.forbids_vertex(v, t + 1)) return;
      if (u != v && constraints.forbids_move(u, v, t)) return;
      if (obstacles.occupied(v, t + 1)) return;
      if (u != v && obstacles.swap_blocked(u, v, t)) return;
      next.push_back(v);
      m.edges[t].push_back({u, v});
    };
    for (const NodeId u : m.layers[t]) {
      try_move(u, u);
      for (const NodeId v : g.neighbors(u)) try_move(u, v);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    m.layers[t + 1] = std::move(next);
    std::sort(m.edges[t].begin(), m.edges[t].end());
  }
  // goal layer must be exactly {goal}
  if (!m.contains(c, goal)) {
    m.layers.assign(c + 1, {});
    m.edges.assign(c, {});
    return m;
  }
  m.layers[c] = {goal};
  auto& es = m.edges[c - 1 >= 0 ? c - 1 : 0];
  if (c > 0)
    es.erase(std::remove_if(es.begin(), es.end(), [&](const auto& e) { return e.second != goal; }),
             es.end());
  detail::mdd_sweep_unreachable(m);
  return m;
}

namespace detail {

// conflicts among a set of paths, parked-at-end semantics
inline std::vector<ConflictReport> find_conflicts(const std::vector<Path>& paths, int limit = -1) {
  std::vector<ConflictReport> out;
  const int k = static_cast<int>(paths.size());
  int T = 0;
  for (const auto& p : paths) T = std::max(T, static_cast<int>(p.size()) - 1);
  for (int t = 0; t <= T; ++t) {
    for (int i = 0; i < k; ++i) {
      const NodeId vi = position(paths[i], t);
      for (int j = i + 1; j < k; ++j) {
        const NodeId vj = position(paths[j], t);
        if (vi == vj)
          out.push_back({ConflictReport::Kind::vertex, i, j, t, vi, 0});
        else if (t < T) {
          const NodeId ni = position(paths[i], t + 1);
          const NodeId nj = position(paths[j], t + 1);
          if (ni == vj && nj == vi && ni != vi)
            out.push_back({ConflictReport::Kind::swap, i, j, t, vi, vj});
        }
        if (limit > 0 && static_cast<int>(out.size()) >= limit) return out;
      }
    }
  }
  return out;
}

inline int count_conflicts(const std::vector<Path>& paths) {
  return static_cast<int>(find_conflicts(paths).size());
}

}  // namespace detail

enum class RefineOutcome { improved, no_improvement, aborted };

struct SubsetResult {
  RefineOutcome outcome = RefineOutcome::no_improvement;
  Solution solution;       // incumbent unless improved
  uint64_t expanded = 0;   // high-level expansions
};

struct IcbsLimits {
  std::optional<Clock::time_point> deadline;
  const std::atomic<bool>* stop = nullptr;
  uint64_t node_limit = 0;  // high-level expansions, 0 = unlimited

  bool interrupted() const {
    if (stop && stop->load(std::memory_order_relaxed)) return true;
    return deadline && Clock::now() >= *deadline;
  }
  SearchLimits low_level() const { return {deadline, stop, 0}; }
};

namespace detail {

struct HLNode {
  std::shared_ptr<const HLNode> parent;
  Constraint added{};  // meaningful when parent != nullptr
  std::vector<Path> paths;  // indexed by subset position
  long long cost = 0;
  int conflicts = 0;
  uint64_t seq = 0;
  // lazily built per subset position, shared with children until invalidated
  mutable std::vector<std::shared_ptr<const Mdd>> mdds;
};

inline ConstraintSet collect_constraints(const HLNode* node, int subset_pos) {
  ConstraintSet cs;
  for (const HLNode* n = node; n && n->parent; n = n->parent.get())
    if (n->added.agent == subset_pos) cs.add(n->added);
  return cs;
}

enum class ConflictClass { cardinal, semi_cardinal, non_cardinal };

// classification per the MDD definition: a vertex conflict is cardinal iff
// the conflicting node is the sole vertex of that layer in both agents'
// MDDs; an edge conflict is cardinal iff the move is forced in both MDDs
inline ConflictClass classify(const ConflictReport& c, const Mdd& mi, const Mdd& mj) {
  auto forced = [&](const Mdd& m, bool second) {
    if (m.empty()) return false;
    if (c.kind == ConflictReport::Kind::vertex)
      return m.layer_width(c.timestep) == 1 && m.contains(c.timestep, c.u);
    const NodeId from = second ? c.v : c.u;
    const NodeId to = second ? c.u : c.v;
    return m.layer_width(c.timestep) == 1 && m.contains(c.timestep, from) &&
           m.layer_width(c.timestep + 1) == 1 && m.contains(c.timestep + 1, to);
  };
  const bool fi = forced(mi, false);
  const bool fj = forced(mj, true);
  if (fi && fj) return ConflictClass::cardinal;
  if (fi || fj) return ConflictClass::semi_cardinal;
  return ConflictClass::non_cardinal;
}

}  // namespace detail

// ICBS over the agents listed in `subset`, treating every other agent's path
// in `current` as a fixed dynamic obstacle. Returns `improved` with the
// subset paths replaced iff the refined subset cost is strictly smaller;
// `aborted` on deadline/node limit; `no_improvement` otherwise. When
// `current_opt` is null (full solve), returns the optimum as soon as found.
namespace detail {

struct IcbsOutcome {
  SearchStatus status = SearchStatus::infeasible;
  std::vector<Path> paths;  // subset paths, found only
  long long cost = 0;
  uint64_t expanded = 0;
};

inline IcbsOutcome icbs_search(const Instance& ins, const std::vector<int>& subset,
                               const FixedObstacles& obstacles, int horizon_hint,
                               const IcbsLimits& limits) {
  const Graph& g = *ins.graph;
  const int k = static_cast<int>(subset.size());
  IcbsOutcome out;

  auto root = std::make_shared<detail::HLNode>();
  root->paths.resize(k);
  root->mdds.assign(k, nullptr);
  for (int p = 0; p < k; ++p) {
    const int i = subset[p];
    auto res = space_time_astar(g, ins.starts[i], ins.goals[i], {}, obstacles, horizon_hint,
                                limits.low_level());
    if (res.status == SearchStatus::aborted) return {SearchStatus::aborted, {}, 0, 0};
    if (res.status == SearchStatus::infeasible) return {SearchStatus::infeasible, {}, 0, 0};
    root->paths[p] = std::move(res.path);
    root->cost += agent_cost(root->paths[p]);
  }
  root->conflicts = detail::count_conflicts(root->paths);

  struct Cmp {
    bool operator()(const std::shared_ptr<const detail::HLNode>& a,
                    const std::shared_ptr<const detail::HLNode>& b) const {
      if (a->cost != b->cost) return a->cost > b->cost;
      if (a->conflicts != b->conflicts) return a->conflicts > b->conflicts;
      return a->seq > b->seq;
    }
  };
  std::priority_queue<std::shared_ptr<const detail::HLNode>,
                      std::vector<std::shared_ptr<const detail::HLNode>>, Cmp>
      open;
  uint64_t seq = 0;
  open.push(root);

  auto mdd_of = [&](const std::shared_ptr<const detail::HLNode>& node, int pos) -> const Mdd& {
    if (!node->mdds[pos]) {
      const int i = subset[pos];
      const ConstraintSet cs = detail::collect_constraints(node.get(), pos);
      node->mdds[pos] = std::make_shared<const Mdd>(
          build_mdd_constrained(g, ins.starts[i], ins.goals[i], agent_cost(node->paths[pos]), cs,
                                obstacles));
    }
    return *node->mdds[pos];
  };

  while (!open.empty()) {
    if (limits.interrupted()) return {SearchStatus::aborted, {}, 0, out.expanded};
    auto node = open.top();
    open.pop();

    auto conflicts = detail::find_conflicts(node->paths);
    if (conflicts.empty()) {
      out.status = SearchStatus::found;
      out.paths = node->paths;
      out.cost = node->cost;
      return out;
    }
    ++out.expanded;
    if (limits.node_limit && out.expanded > limits.node_limit)
      return {SearchStatus::aborted, {}, 0, out.expanded};

    // prefer cardinal conflicts, then semi-cardinal, earliest first
    const ConflictReport* chosen = nullptr;
    detail::ConflictClass chosen_class = detail::ConflictClass::non_cardinal;
    for (const auto& c : conflicts) {
      const auto cls = detail::classify(c, mdd_of(node, c.agent_a), mdd_of(node, c.agent_b));
      if (!chosen || cls < chosen_class) {
        chosen = &c;
        chosen_class = cls;
      }
      if (chosen_class == detail::ConflictClass::cardinal) break;
    }

    for (int side = 0; side < 2; ++side) {
      const int pos = side == 0 ? chosen->agent_a : chosen->agent_b;
      Constraint con;
      con.agent = pos;
      if (chosen->kind == ConflictReport::Kind::vertex) {
        con.kind = Constraint::Kind::vertex;
        con.u = chosen->u;
        con.t = chosen->timestep;
      } else {
        con.kind = Constraint::Kind::edge;
        con.u = side == 0 ? chosen->u : chosen->v;
        con.v = side == 0 ? chosen->v : chosen->u;
        con.t = chosen->timestep;
      }
      auto child = std::make_shared<detail::HLNode>();
      child->parent = node;
      child->added = con;
      child->paths = node->paths;
      child->seq = ++seq;
      ConstraintSet cs = detail::collect_constraints(child.get(), pos);
      const int i = subset[pos];
      auto res = space_time_astar(g, ins.starts[i], ins.goals[i], cs, obstacles, horizon_hint,
                                  limits.low_level());
      if (res.status == SearchStatus::aborted) return {SearchStatus::aborted, {}, 0, out.expanded};
      if (res.status == SearchStatus::infeasible) continue;
      child->paths[pos] = std::move(res.path);
      child->cost = 0;
      for (const auto& p : child->paths) child->cost += agent_cost(p);
      assert(child->cost >= node->cost);
      child->conflicts = detail::count_conflicts(child->paths);
      child->mdds = node->mdds;
      child->mdds[pos] = nullptr;
      open.push(std::move(child));
    }
  }
  return {SearchStatus::infeasible, {}, 0, out.expanded};
}

}  // namespace detail

inline SubsetResult icbs_subset(const Instance& ins, const std::vector<int>& subset_in,
                                const Solution& current, const IcbsLimits& limits) {
  SubsetResult result;
  result.solution = current;

  // agents whose fixed-world search is infeasible keep their incumbent paths
  // and become obstacles for the rest of the subset
  std::vector<int> subset = subset_in;
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());

  std::vector<char> is_fixed(ins.n(), 1);
  for (const int i : subset) is_fixed[i] = 0;

  int horizon_hint = 0;
  for (const int i : subset)
    horizon_hint = std::max(horizon_hint, static_cast<int>(current.paths[i].size()) - 1);

  detail::IcbsOutcome out;
  while (true) {
    FixedObstacles obstacles = FixedObstacles::from_solution(current, is_fixed);
    out = detail::icbs_search(ins, subset, obstacles, horizon_hint, limits);
    result.expanded += out.expanded;
    if (out.status != SearchStatus::infeasible) break;
    // find the strangled agent and fix it, retry with the rest
    bool fixed_one = false;
    for (const int i : subset) {
      ConstraintSet none;
      auto res = space_time_astar(*ins.graph, ins.starts[i], ins.goals[i], none, obstacles,
                                  horizon_hint, limits.low_level());
      if (res.status == SearchStatus::aborted) {
        result.outcome = RefineOutcome::aborted;
        return result;
      }
      if (res.status == SearchStatus::infeasible) {
        is_fixed[i] = 1;
        subset.erase(std::find(subset.begin(), subset.end(), i));
        fixed_one = true;
        break;
      }
    }
    if (!fixed_one || subset.empty()) {
      result.outcome = RefineOutcome::no_improvement;
      return result;
    }
  }

  if (out.status == SearchStatus::aborted) {
    result.outcome = RefineOutcome::aborted;
    return result;
  }

  long long incumbent_cost = 0;
  for (const int i : subset) incumbent_cost += agent_cost(trimmed(current.paths[i]));
  if (out.cost >= incumbent_cost) {
    result.outcome = RefineOutcome::no_improvement;
    return result;
  }
  result.outcome = RefineOutcome::improved;
  for (size_t p = 0; p < subset.size(); ++p) result.solution.paths[subset[p]] = out.paths[p];
  result.solution.normalize();
  return result;
}

struct SolveResult {
  SearchStatus status = SearchStatus::infeasible;  // found | aborted (timeout)
  Solution solution;
  uint64_t expanded = 0;
};

// full-instance optimal solve (subset = all agents, no obstacles)
inline SolveResult icbs_full(const Instance& ins, const IcbsLimits& limits = {}) {
  std::vector<int> all(ins.n());
  for (int i = 0; i < ins.n(); ++i) all[i] = i;
  auto out = detail::icbs_search(ins, all, {}, 0, limits);
  SolveResult res;
  res.status = out.status;
  res.expanded = out.expanded;
  if (out.status == SearchStatus::found) {
    res.solution.paths = std::move(out.paths);
    res.solution.normalize();
  }
  return res;
}

}  // namespace mapf
