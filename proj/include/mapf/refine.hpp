#pragma once

#include <functional>
#include <optional>
#include <string>

#include "mapf/ecbs.hpp"
#include "mapf/icbs.hpp"
#include "mapf/init_solvers.hpp"
#include "mapf/rng.hpp"

namespace mapf {

enum class Rule { single_agent, random_set, focus_goals, local_repair, using_mdd, bottleneck };

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::single_agent: return "single";
    case Rule::random_set: return "random";
    case Rule::focus_goals: return "focus_goals";
    case Rule::local_repair: return "local_repair";
    case Rule::using_mdd: return "using_mdd";
    case Rule::bottleneck: return "bottleneck";
  }
  return "?";
}

struct ModificationSet {
  std::vector<int> agents;
  Rule origin = Rule::single_agent;
};

// k distinct agents, uniform without replacement
inline ModificationSet select_random(int n, int k, Rng& rng) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  ModificationSet m;
  m.origin = Rule::random_set;
  m.agents = sample_without_replacement(all, static_cast<size_t>(k), rng);
  std::sort(m.agents.begin(), m.agents.end());
  return m;
}

// agents occupying a_i's goal at any t in [dist_i, cost_i] (a_i included)
inline ModificationSet select_focus_goals(const Instance& ins, const Solution& s, int i) {
  ModificationSet m;
  m.origin = Rule::focus_goals;
  const NodeId gi = ins.goals[i];
  const int lo = ins.graph->dist(ins.starts[i], gi);
  const int hi = agent_cost(s.paths[i]);
  for (int j = 0; j < ins.n(); ++j)
    for (int t = lo; t <= hi; ++t)
      if (position(s.paths[j], t) == gi) {
        m.agents.push_back(j);
        break;
      }
  return m;
}

// using-MDD: for each candidate cost c in [dist_i, cost_i), prune a_i's MDD
// cumulatively by the other agents' paths in index order; any agent whose
// pruning changes the MDD joins the set
inline ModificationSet select_using_mdd(const Instance& ins, const Solution& s, int i) {
  ModificationSet m;
  m.origin = Rule::using_mdd;
  m.agents.push_back(i);
  const int lo = ins.graph->dist(ins.starts[i], ins.goals[i]);
  const int hi = agent_cost(s.paths[i]);
  std::vector<char> in_set(ins.n(), 0);
  in_set[i] = 1;
  for (int c = lo; c < hi; ++c) {
    Mdd mdd = build_mdd(*ins.graph, ins.starts[i], ins.goals[i], c);
    for (int j = 0; j < ins.n() && !mdd.empty(); ++j) {
      if (j == i) continue;
      const auto rep = prune_mdd(mdd, s.paths[j]);
      if (rep.changed && !in_set[j]) {
        in_set[j] = 1;
        m.agents.push_back(j);
      }
    }
  }
  std::sort(m.agents.begin(), m.agents.end());
  return m;
}

// using-bottleneck-agent: a_j joins when its best path ignoring pi_i and
// pi_j costs strictly less than its current cost
inline ModificationSet select_bottleneck(const Instance& ins, const Solution& s, int i) {
  ModificationSet m;
  m.origin = Rule::bottleneck;
  m.agents.push_back(i);
  const int horizon = s.horizon();
  for (int j = 0; j < ins.n(); ++j) {
    if (j == i) continue;
    FixedObstacles obstacles;
    for (int k = 0; k < ins.n(); ++k)
      if (k != i && k != j) obstacles.add_path(s.paths[k]);
    auto res =
        space_time_astar(*ins.graph, ins.starts[j], ins.goals[j], {}, obstacles, horizon);
    if (res.status == SearchStatus::found &&
        agent_cost(res.path) < agent_cost(s.paths[j]))
      m.agents.push_back(j);
  }
  std::sort(m.agents.begin(), m.agents.end());
  return m;
}

// Local repair around the goal: when pi_i ends with (..., g_i, v, g_i, ...,
// g_i) because some a_j sits on g_i at the excursion timestep, replace the
// excursion with waiting at g_i and replan a_j's single path. Committed only
// when the combined cost strictly drops.
inline std::optional<Solution> repair_local_goals(const Instance& ins, const Solution& s, int i) {
  const NodeId gi = ins.goals[i];
  const Path& p = s.paths[i];
  const int T = agent_cost(p);
  if (T < 2 || position(p, T - 2) != gi) return std::nullopt;

  int j = -1;
  for (int k = 0; k < ins.n(); ++k)
    if (k != i && position(s.paths[k], T - 1) == gi) {
      j = k;
      break;
    }
  if (j < 0) return std::nullopt;

  Path repaired = p;
  repaired[T - 1] = gi;
  repaired = trimmed(repaired);

  Solution cand = s;
  cand.paths[i] = repaired;
  FixedObstacles obstacles;
  for (int k = 0; k < ins.n(); ++k)
    if (k != j) obstacles.add_path(cand.paths[k]);
  auto res = space_time_astar(*ins.graph, ins.starts[j], ins.goals[j], {}, obstacles,
                              cand.horizon());
  if (res.status != SearchStatus::found) return std::nullopt;

  const long long before = agent_cost(p) + agent_cost(s.paths[j]);
  const long long after = agent_cost(repaired) + agent_cost(res.path);
  if (after >= before) return std::nullopt;
  cand.paths[j] = std::move(res.path);
  cand.normalize();
  return cand;
}

enum class AgentOrder { index, cost_gap_descending };

enum class InitSolver { pibt_complete, pibt, ps, hca, whca, ecbs };

struct InitConfig {
  InitSolver solver = InitSolver::pibt_complete;
  int whca_window = 10;
  double ecbs_w = 1.2;
};

struct TraceRow {
  int64_t elapsed_ms = 0;
  int iteration = 0;
  long long sum_of_costs = 0;
  std::string rule;
  int set_size = 0;
  std::string outcome;  // improved | no_improvement | aborted
};

struct Trace {
  std::vector<TraceRow> rows;
};

inline void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "elapsed_ms,iteration,sum_of_costs,rule,set_size,outcome\n";
  for (const auto& r : trace.rows)
    os << r.elapsed_ms << ',' << r.iteration << ',' << r.sum_of_costs << ',' << r.rule << ','
       << r.set_size << ',' << r.outcome << '\n';
}

struct RefineConfig {
  InitConfig init;
  // the composition order; a custom rule list replaces it
  std::vector<Rule> schedule = {Rule::local_repair, Rule::focus_goals, Rule::using_mdd,
                                Rule::random_set};
  int random_set_size = 30;
  int refine_timeout_ms = 500;   // early stop: per-refinement wall budget
  uint64_t node_limit = 10000;   // early stop: high-level expansion cap
  int64_t budget_ms = 0;         // total wall budget incl. the initial solver; 0 = none
  int iteration_cap = 0;         // 0 = none (deterministic mode defaults to 1000)
  uint64_t seed = 0;
  bool deterministic = false;    // iteration-keyed: all wall-clock limits off
  AgentOrder agent_order = AgentOrder::index;
  const std::atomic<bool>* stop = nullptr;
  // streamed per appended row (incumbent is valid and complete at that point)
  std::function<void(const TraceRow&, const Solution&)> on_iteration;
};

struct RefineResult {
  bool failure = true;
  Solution solution;
  Trace trace;
  int64_t init_ms = 0;
  int64_t total_ms = 0;
};

// "composition" or a comma list of rule names
inline std::vector<Rule> parse_rules(const std::string& text) {
  if (text.empty() || text == "composition")
    return {Rule::local_repair, Rule::focus_goals, Rule::using_mdd, Rule::random_set};
  std::vector<Rule> rules;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "single") rules.push_back(Rule::single_agent);
    else if (item == "random") rules.push_back(Rule::random_set);
    else if (item == "focus_goals") rules.push_back(Rule::focus_goals);
    else if (item == "local_repair") rules.push_back(Rule::local_repair);
    else if (item == "using_mdd") rules.push_back(Rule::using_mdd);
    else if (item == "bottleneck") rules.push_back(Rule::bottleneck);
    else throw std::invalid_argument("unknown rule: " + item);
  }
  if (rules.empty()) throw std::invalid_argument("empty rule list");
  return rules;
}

inline InitSolver parse_init_solver(const std::string& name) {
  if (name == "pibt_complete") return InitSolver::pibt_complete;
  if (name == "pibt") return InitSolver::pibt;
  if (name == "ps") return InitSolver::ps;
  if (name == "hca") return InitSolver::hca;
  if (name == "whca") return InitSolver::whca;
  if (name == "ecbs") return InitSolver::ecbs;
  throw std::invalid_argument("unknown initial solver: " + name);
}

namespace detail {

inline InitResult run_init_solver(const Instance& ins, const InitConfig& cfg,
                                  const IcbsLimits& limits) {
  switch (cfg.solver) {
    case InitSolver::pibt_complete:
      return pibt_complete(ins);
    case InitSolver::pibt: {
      // standalone PIBT is incomplete; give it room, then check settledness
      int maxdist = 0;
      for (int i = 0; i < ins.n(); ++i)
        maxdist = std::max(maxdist, ins.graph->dist(ins.starts[i], ins.goals[i]));
      Solution s = pibt(ins, maxdist + 2 * ins.graph->node_count());
      for (int i = 0; i < ins.n(); ++i)
        if (s.paths[i].back() != ins.goals[i]) return {};
      return {true, std::move(s)};
    }
    case InitSolver::ps: {
      auto res = push_and_swap(ins);
      if (!res.success) return {};
      return {true, compress(ins, res.solution)};
    }
    case InitSolver::hca:
      return hca(ins);
    case InitSolver::whca:
      return whca(ins, cfg.whca_window);
    case InitSolver::ecbs: {
      auto res = ecbs(ins, cfg.ecbs_w, limits);
      if (res.status != SearchStatus::found) return {};
      return {true, std::move(res.solution)};
    }
  }
  return {};
}

}  // namespace detail

// The anytime loop: obtain an initial solution, then repeatedly select a
// modification set and re-solve it optimally with everyone else frozen.
// Interruptible at every iteration boundary; the incumbent only improves.
inline RefineResult iterative_refine(const Instance& ins, const RefineConfig& cfg) {
  RefineResult out;
  const auto start = Clock::now();
  const auto elapsed_ms = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
  };
  std::optional<Clock::time_point> budget_end;
  if (!cfg.deterministic && cfg.budget_ms > 0)
    budget_end = start + std::chrono::milliseconds(cfg.budget_ms);
  int iteration_cap = cfg.iteration_cap;
  if (iteration_cap <= 0) iteration_cap = cfg.deterministic ? 1000 : 0;

  IcbsLimits init_limits;
  init_limits.deadline = budget_end;
  init_limits.stop = cfg.stop;
  auto init = detail::run_init_solver(ins, cfg.init, init_limits);
  out.init_ms = elapsed_ms();
  if (!init.success) {
    out.total_ms = elapsed_ms();
    return out;  // FAILURE
  }
  out.failure = false;
  Solution incumbent = std::move(init.solution);
  long long cost = sum_of_costs(incumbent);
  const long long lower_bound = ins.distance_lower_bound();

  auto log_row = [&](int iter, Rule rule, const char* rule_override, int set_size,
                     const char* outcome) {
    TraceRow row{elapsed_ms(), iter, cost, rule_override ? rule_override : rule_name(rule),
                 set_size, outcome};
    out.trace.rows.push_back(row);
    if (cfg.on_iteration) cfg.on_iteration(row, incumbent);
  };
  log_row(0, Rule::single_agent, "init", 0, "improved");

  const int n = ins.n();
  Rng rng(cfg.seed);
  size_t stage = 0;
  int cursor = 0;
  int zero_streak = 0;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rebuild_order = [&] {
    std::iota(order.begin(), order.end(), 0);
    if (cfg.agent_order == AgentOrder::cost_gap_descending)
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        const long long ga = agent_cost(incumbent.paths[a]) - ins.graph->dist(ins.starts[a], ins.goals[a]);
        const long long gb = agent_cost(incumbent.paths[b]) - ins.graph->dist(ins.starts[b], ins.goals[b]);
        return ga != gb ? ga > gb : a < b;
      });
  };
  rebuild_order();

  auto refine_subset = [&](const std::vector<int>& agents) -> RefineOutcome {
    IcbsLimits limits;
    limits.node_limit = cfg.node_limit;
    limits.stop = cfg.stop;
    if (!cfg.deterministic) {
      auto deadline = Clock::now() + std::chrono::milliseconds(cfg.refine_timeout_ms);
      if (budget_end && *budget_end < deadline) deadline = *budget_end;
      limits.deadline = deadline;
    }
    auto res = icbs_subset(ins, agents, incumbent, limits);
    if (res.outcome == RefineOutcome::improved) {
      incumbent = std::move(res.solution);
      cost = sum_of_costs(incumbent);
    }
    return res.outcome;
  };

  for (int iter = 1; cfg.schedule.size() > 0; ++iter) {
    if (cost <= lower_bound) break;  // provably optimal
    if (iteration_cap > 0 && iter > iteration_cap) break;
    if (cfg.stop && cfg.stop->load(std::memory_order_relaxed)) break;
    if (budget_end && Clock::now() >= *budget_end) break;

    const Rule rule = cfg.schedule[stage];
    RefineOutcome outcome = RefineOutcome::no_improvement;
    int set_size = 0;

    if (rule == Rule::random_set) {
      auto m = select_random(n, std::min(cfg.random_set_size, n), rng);
      set_size = static_cast<int>(m.agents.size());
      outcome = refine_subset(m.agents);
    } else {
      const int i = order[cursor];
      cursor = (cursor + 1) % n;
      if (cursor == 0) rebuild_order();
      if (rule == Rule::local_repair) {
        set_size = 1;
        auto repaired = repair_local_goals(ins, incumbent, i);
        if (repaired) {
          incumbent = std::move(*repaired);
          cost = sum_of_costs(incumbent);
          outcome = RefineOutcome::improved;
          set_size = 2;
        }
      } else {
        ModificationSet m;
        if (rule == Rule::single_agent)
          m.agents = {i};
        else if (rule == Rule::focus_goals)
          m = select_focus_goals(ins, incumbent, i);
        else if (rule == Rule::using_mdd)
          m = select_using_mdd(ins, incumbent, i);
        else
          m = select_bottleneck(ins, incumbent, i);
        set_size = static_cast<int>(m.agents.size());
        const bool already_optimal =
            m.agents.size() == 1 &&
            agent_cost(incumbent.paths[m.agents[0]]) ==
                ins.graph->dist(ins.starts[m.agents[0]], ins.goals[m.agents[0]]);
        if (!already_optimal) outcome = refine_subset(m.agents);
      }
    }

    log_row(iter, rule, nullptr, set_size,
            outcome == RefineOutcome::improved
                ? "improved"
                : (outcome == RefineOutcome::aborted ? "aborted" : "no_improvement"));

    if (outcome == RefineOutcome::improved)
      zero_streak = 0;
    else
      ++zero_streak;
    const bool last_stage = stage + 1 == cfg.schedule.size();
    if (zero_streak >= n && !(last_stage && rule == Rule::random_set)) {
      if (last_stage) break;  // schedule exhausted
      ++stage;
      cursor = 0;
      zero_streak = 0;
      rebuild_order();
    }
  }

  out.solution = std::move(incumbent);
  out.solution.normalize();
  out.total_ms = elapsed_ms();
  return out;
}

}  // namespace mapf
