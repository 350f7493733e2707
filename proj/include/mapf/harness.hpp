#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "mapf/refine.hpp"

namespace mapf {

struct RunSpec {
  std::string map_path;   // optional when the instance file embeds map=
  std::string scen_path;  // .scen v1 or internal format; empty = random instance
  int agents = 1;
  uint64_t seed = 0;
  RefineConfig refine;
  std::string out_solution;
  std::string out_trace;
  std::string name = "run";
};

struct RunSummary {
  bool failure = true;
  long long initial_cost = 0, final_cost = 0, lower_bound = 0;
  double initial_ratio = 1.0, final_ratio = 1.0;
  int64_t init_ms = 0, total_ms = 0;
  uint64_t instance_hash = 0;
};

inline uint64_t instance_hash(const Instance& ins) {
  uint64_t h = 1469598103934665603ULL;  // FNV-1a
  auto mix = [&](uint64_t x) {
    h ^= x;
    h *= 1099511628211ULL;
  };
  for (int i = 0; i < ins.n(); ++i) {
    const Cell s = ins.graph->cell(ins.starts[i]);
    const Cell g = ins.graph->cell(ins.goals[i]);
    mix(static_cast<uint64_t>(s.x) << 32 | static_cast<uint32_t>(s.y));
    mix(static_cast<uint64_t>(g.x) << 32 | static_cast<uint32_t>(g.y));
  }
  return h;
}

namespace detail {

inline Instance load_instance(const RunSpec& spec, std::optional<Graph>& graph_out) {
  std::string map_path = spec.map_path;
  if (!spec.scen_path.empty()) {
    std::ifstream probe(spec.scen_path);
    if (!probe) throw ParseError("cannot open instance file: " + spec.scen_path);
    std::string first;
    std::getline(probe, first);
    const bool internal = first.rfind("map=", 0) == 0 || first.rfind("#", 0) == 0;
    if (internal && map_path.empty()) {
      std::ifstream again(spec.scen_path);
      const std::string embedded = instance_map_path(again);
      map_path = (std::filesystem::path(spec.scen_path).parent_path() / embedded).string();
    }
    graph_out.emplace(parse_map_file(map_path));
    std::ifstream in(spec.scen_path);
    return internal ? parse_instance_text(in, *graph_out) : parse_scen(in, *graph_out, spec.agents);
  }
  if (map_path.empty()) throw ParseError("no map given");
  graph_out.emplace(parse_map_file(map_path));
  return random_instance(*graph_out, spec.agents, spec.seed);
}

}  // namespace detail

// Load, solve, write artifacts. The trace CSV is appended row by row while
// the run progresses, so an interrupted process leaves a usable prefix.
inline RunSummary run_single(const RunSpec& spec) {
  std::optional<Graph> graph;
  const Instance ins = detail::load_instance(spec, graph);

  RunSummary sum;
  sum.instance_hash = instance_hash(ins);
  sum.lower_bound = ins.distance_lower_bound();

  std::ofstream trace_out;
  RefineConfig cfg = spec.refine;
  cfg.seed = cfg.seed ? cfg.seed : spec.seed;
  auto user_cb = cfg.on_iteration;
  if (!spec.out_trace.empty()) {
    trace_out.open(spec.out_trace);
    trace_out << "elapsed_ms,iteration,sum_of_costs,rule,set_size,outcome\n" << std::flush;
  }
  long long initial_cost = -1;
  cfg.on_iteration = [&](const TraceRow& row, const Solution& incumbent) {
    if (initial_cost < 0) initial_cost = row.sum_of_costs;
    if (trace_out.is_open()) {
      trace_out << row.elapsed_ms << ',' << row.iteration << ',' << row.sum_of_costs << ','
                << row.rule << ',' << row.set_size << ',' << row.outcome << '\n'
                << std::flush;
    }
    if (user_cb) user_cb(row, incumbent);
  };

  auto res = iterative_refine(ins, cfg);
  sum.failure = res.failure;
  sum.init_ms = res.init_ms;
  sum.total_ms = res.total_ms;
  if (res.failure) return sum;

  sum.initial_cost = initial_cost;
  sum.final_cost = sum_of_costs(res.solution);
  sum.initial_ratio = sum.lower_bound > 0
                          ? static_cast<double>(sum.initial_cost) / static_cast<double>(sum.lower_bound)
                          : 1.0;
  sum.final_ratio = sum.lower_bound > 0
                        ? static_cast<double>(sum.final_cost) / static_cast<double>(sum.lower_bound)
                        : 1.0;
  if (!spec.out_solution.empty()) {
    std::ofstream out(spec.out_solution);
    write_solution(out, *ins.graph, res.solution);
  }
  return sum;
}

struct SweepConfig {
  std::string map_path;
  int agents = 10;
  int instances = 1;
  uint64_t seed = 1;
  int jobs = 1;
  RefineConfig base;                 // shared knobs
  std::vector<RunSpec> pipelines;    // one spec per solver pipeline (name + init + rules)
};

struct SweepRow {
  std::string pipeline;
  int instance = 0;
  uint64_t seed = 0;
  RunSummary summary;
};

struct SweepReport {
  std::vector<SweepRow> rows;

  void write_csv(std::ostream& os) const {
    os << "pipeline,instance,seed,instance_hash,initial_cost,final_cost,lower_bound,"
          "initial_ratio,final_ratio,success,init_ms,total_ms\n";
    for (const auto& r : rows) {
      os << r.pipeline << ',' << r.instance << ',' << r.seed << ',' << std::hex
         << r.summary.instance_hash << std::dec << ',' << r.summary.initial_cost << ','
         << r.summary.final_cost << ',' << r.summary.lower_bound << ',' << std::setprecision(6)
         << std::fixed << r.summary.initial_ratio << ',' << r.summary.final_ratio << ','
         << (r.summary.failure ? 0 : 1) << ',' << r.summary.init_ms << ',' << r.summary.total_ms
         << '\n';
      os.unsetf(std::ios::fixed);
    }
    // per-pipeline aggregates over successful rows
    std::vector<std::string> names;
    for (const auto& r : rows)
      if (std::find(names.begin(), names.end(), r.pipeline) == names.end())
        names.push_back(r.pipeline);
    for (const auto& name : names) {
      int total = 0, ok = 0;
      double init_ratio = 0, final_ratio = 0, init_ms = 0;
      for (const auto& r : rows) {
        if (r.pipeline != name) continue;
        ++total;
        if (r.summary.failure) continue;
        ++ok;
        init_ratio += r.summary.initial_ratio;
        final_ratio += r.summary.final_ratio;
        init_ms += static_cast<double>(r.summary.init_ms);
      }
      os << "# summary pipeline=" << name << " success=" << ok << '/' << total;
      if (ok > 0)
        os << " mean_initial_ratio=" << std::setprecision(6) << std::fixed << init_ratio / ok
           << " mean_final_ratio=" << final_ratio / ok << " mean_init_ms=" << init_ms / ok;
      os << '\n';
      os.unsetf(std::ios::fixed);
    }
  }
};

// Every pipeline sees the identical instances (same seeds). Rows may run in
// parallel workers; report assembly is sequential.
inline SweepReport run_sweep(const SweepConfig& cfg) {
  SweepReport report;
  std::vector<std::pair<int, int>> tasks;  // (pipeline idx, instance idx)
  for (int p = 0; p < static_cast<int>(cfg.pipelines.size()); ++p)
    for (int k = 0; k < cfg.instances; ++k) tasks.push_back({p, k});
  report.rows.resize(tasks.size());

  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      const size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const auto [p, k] = tasks[t];
      RunSpec spec = cfg.pipelines[p];
      spec.map_path = cfg.map_path;
      spec.agents = cfg.agents;
      spec.seed = cfg.seed + static_cast<uint64_t>(k);
      SweepRow row;
      row.pipeline = spec.name;
      row.instance = k;
      row.seed = spec.seed;
      try {
        row.summary = run_single(spec);
      } catch (const std::exception&) {
        row.summary.failure = true;
      }
      report.rows[t] = std::move(row);
    }
  };
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return report;
}

}  // namespace mapf
