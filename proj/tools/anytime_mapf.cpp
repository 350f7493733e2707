// Command-line front end: solve one map/scenario pair with the anytime
// refinement loop, or run a benchmark sweep from a config file.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "mapf/harness.hpp"

namespace {

mapf::SweepConfig parse_sweep_config(const std::string& path, const mapf::RunSpec& base) {
  std::ifstream in(path);
  if (!in) throw mapf::ParseError("cannot open sweep config: " + path);
  mapf::SweepConfig cfg;
  cfg.map_path = base.map_path;
  cfg.agents = base.agents;
  cfg.seed = base.seed;
  cfg.base = base.refine;

  auto apply_pipeline = [&](const std::string& value) {
    mapf::RunSpec spec;
    spec.refine = cfg.base;
    spec.name = "pipeline" + std::to_string(cfg.pipelines.size());
    std::stringstream ss(value);
    std::string kv;
    while (ss >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw mapf::ParseError("pipeline entry needs key=value: " + kv);
      const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "name") spec.name = val;
      else if (key == "init") spec.refine.init.solver = mapf::parse_init_solver(val);
      else if (key == "rules") spec.refine.schedule = mapf::parse_rules(val);
      else if (key == "whca_window") spec.refine.init.whca_window = std::stoi(val);
      else if (key == "ecbs_w") spec.refine.init.ecbs_w = std::stod(val);
      else throw mapf::ParseError("unknown pipeline key: " + key);
    }
    cfg.pipelines.push_back(std::move(spec));
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw mapf::ParseError("sweep config line " + std::to_string(line_no) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "map") cfg.map_path = val;
    else if (key == "agents") cfg.agents = std::stoi(val);
    else if (key == "instances") cfg.instances = std::stoi(val);
    else if (key == "seed") cfg.seed = std::stoull(val);
    else if (key == "jobs") cfg.jobs = std::stoi(val);
    else if (key == "budget_ms") cfg.base.budget_ms = std::stoll(val);
    else if (key == "refine_timeout_ms") cfg.base.refine_timeout_ms = std::stoi(val);
    else if (key == "node_limit") cfg.base.node_limit = std::stoull(val);
    else if (key == "random_set_size") cfg.base.random_set_size = std::stoi(val);
    else if (key == "iterations") cfg.base.iteration_cap = std::stoi(val);
    else if (key == "deterministic") cfg.base.deterministic = val != "0";
    else if (key == "pipeline") apply_pipeline(val);
    else throw mapf::ParseError("sweep config line " + std::to_string(line_no) + ": unknown key " + key);
  }
  if (cfg.pipelines.empty()) throw mapf::ParseError("sweep config: no pipeline lines");
  for (auto& p : cfg.pipelines) {
    // shared knobs may have been set after pipeline lines; reapply budgets
    p.refine.budget_ms = cfg.base.budget_ms;
    p.refine.refine_timeout_ms = cfg.base.refine_timeout_ms;
    p.refine.node_limit = cfg.base.node_limit;
    p.refine.random_set_size = cfg.base.random_set_size;
    p.refine.iteration_cap = cfg.base.iteration_cap;
    p.refine.deterministic = cfg.base.deterministic;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anytime multi-agent pathfinding: fast initial solution, then iterative refinement"};
  app.set_config("--config");

  mapf::RunSpec spec;
  std::string init = "pibt_complete";
  std::string rules = "composition";
  std::string sweep_path;
  int whca_window = 10;
  double ecbs_w = 1.2;

  app.add_option("--map", spec.map_path, "MovingAI .map file");
  app.add_option("--scen", spec.scen_path, "MovingAI .scen (v1) or internal instance file");
  app.add_option("--agents", spec.agents, "number of agents")->check(CLI::PositiveNumber);
  app.add_option("--seed", spec.seed, "seed for random instances and the random rule");
  app.add_option("--init", init, "initial solver: pibt_complete|pibt|ps|hca|whca|ecbs");
  app.add_option("--whca-window", whca_window, "WHCA lookahead window");
  app.add_option("--ecbs-w", ecbs_w, "ECBS suboptimality factor");
  app.add_option("--rules", rules, "'composition' or comma list of refinement rules");
  app.add_option("--random-set-size", spec.refine.random_set_size, "agents per random set");
  app.add_option("--refine-timeout-ms", spec.refine.refine_timeout_ms,
                 "early-stop timeout per refinement");
  app.add_option("--node-limit", spec.refine.node_limit, "early-stop node limit per refinement");
  app.add_option("--budget-ms", spec.refine.budget_ms, "total budget incl. the initial solver");
  app.add_option("--iterations", spec.refine.iteration_cap, "iteration cap");
  app.add_flag("--deterministic", spec.refine.deterministic,
               "iteration-keyed run: ignore wall-clock limits");
  app.add_option("--out-solution", spec.out_solution, "write the final paths here");
  app.add_option("--out-trace", spec.out_trace, "write the refinement trace CSV here");
  app.add_option("--sweep", sweep_path, "run a benchmark sweep from this config file");

  CLI11_PARSE(app, argc, argv);

  try {
    spec.refine.init.solver = mapf::parse_init_solver(init);
    spec.refine.init.whca_window = whca_window;
    spec.refine.init.ecbs_w = ecbs_w;
    spec.refine.schedule = mapf::parse_rules(rules);

    if (!sweep_path.empty()) {
      const auto cfg = parse_sweep_config(sweep_path, spec);
      const auto report = mapf::run_sweep(cfg);
      report.write_csv(std::cout);
      return 0;
    }

    const auto sum = mapf::run_single(spec);
    if (sum.failure) {
      std::fprintf(stderr, "FAILURE: no initial solution\n");
      return 1;
    }
    std::printf("cost=%lld ratio=%.6f init_ms=%lld total_ms=%lld\n", sum.final_cost,
                sum.final_ratio, static_cast<long long>(sum.init_ms),
                static_cast<long long>(sum.total_ms));
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
