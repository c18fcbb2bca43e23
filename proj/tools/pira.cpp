// Command-line front end: scenario generation, exact solve, training, sweeps and plots.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include "CLI11.hpp"
#include "pira/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pira::ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw pira::ConfigError("'" + path + "': " + e.what());
  }
}

std::string output_dir(const std::string& flag, const std::string& command) {
  if (!flag.empty()) return flag;
  const char* root = std::getenv("PIRA_OUT");
  return (fs::path(root && *root ? root : "pira-out") / command).string();
}

std::ofstream open_file(const fs::path& p) {
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw pira::Error("cannot write '" + p.string() + "'");
  return out;
}

void write_json(const fs::path& p, const json& doc) {
  auto out = open_file(p);
  out << doc.dump(2) << '\n';
}

std::vector<pira::DecisionRecord> decisions_of(const pira::Workload& w, const pira::Trace& trace) {
  std::vector<pira::DecisionRecord> rows;
  for (int t = 0; t < w.horizon(); ++t)
    for (const auto& r : w.slots[t]) {
      pira::DecisionRecord rec{t + 1, r.id, std::nullopt, false, {}};
      for (const auto& a : trace.slots[t].accepted)
        if (a.request.id == r.id) {
          rec.action = a.action;
          rec.accepted = true;
        }
      rows.push_back(rec);
    }
  return rows;
}

struct Options {
  std::string config;
  std::string scenario;
  std::string out;
  std::string input;
  std::string method = "orient";
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<int> requests_total;
  std::optional<int> horizon;
  std::optional<int> nodes;
  std::optional<int> episodes;
  std::optional<int> seeds;
  std::optional<int> workers;
};

pira::Scenario scenario_for(const Options& o, const json& config) {
  pira::Scenario s;
  if (!o.scenario.empty())
    s = pira::load_scenario(o.scenario);
  else if (config.contains("scenario") && config["scenario"].is_string())
    s = pira::load_scenario(config["scenario"].get<std::string>());
  else if (config.contains("scenario"))
    s = pira::scenario_from_json(config["scenario"]);
  else
    throw pira::ConfigError("no scenario given (use --scenario or a \"scenario\" entry in --config)");
  if (o.alpha) s.alpha = *o.alpha;
  return s;
}

int cmd_gen(const Options& o) {
  const json config = o.config.empty() ? json::object() : read_json(o.config);
  auto desk = pira::desk_config_from_json(config.value("desk", config));
  if (o.seed) desk.seed = *o.seed;
  if (o.alpha) desk.alpha = *o.alpha;
  if (o.requests_total) desk.requests_total = *o.requests_total;
  if (o.horizon) desk.horizon = *o.horizon;
  if (o.nodes) desk.nodes = *o.nodes;
  const auto s = pira::make_desk_scenario(desk);
  const fs::path dir = output_dir(o.out, "gen");
  write_json(dir / "scenario.json", pira::scenario_to_json(s));
  std::printf("scenario: N=%d V=%d P=%d I=%d |A|=%d R=%d -> %s\n", s.topology.device_count(),
              s.topology.node_count(), s.topology.path_count(), s.catalog.instance_count(),
              pira::ActionSpace(s.topology, s.catalog).size(), s.workload.request_count(),
              (dir / "scenario.json").string().c_str());
  return kOk;
}

int cmd_solve(const Options& o) {
  const json config = o.config.empty() ? json::object() : read_json(o.config);
  const auto s = scenario_for(o, config);
  pira::OracleBounds bounds;
  if (config.contains("oracle_bounds")) {
    bounds.max_requests_per_slot = config["oracle_bounds"].value("max_requests_per_slot", bounds.max_requests_per_slot);
    bounds.max_nodes = config["oracle_bounds"].value("max_nodes", bounds.max_nodes);
    bounds.max_actions = config["oracle_bounds"].value("max_actions", bounds.max_actions);
  }
  const auto sol = pira::solve_horizon(s.topology, s.catalog, s.workload, s.alpha, s.latency, bounds);
  const auto m = pira::evaluate_trace(s.topology, sol.trace, s.alpha, s.workload.request_count());
  const fs::path dir = output_dir(o.out, "solve");
  {
    auto out = open_file(dir / "trace.csv");
    pira::write_allocation_trace(out, decisions_of(s.workload, sol.trace));
  }
  write_json(dir / "solution.json", {{"objective", sol.objective},
                                     {"total_profit", m.total_profit},
                                     {"total_energy", m.total_energy},
                                     {"supported", m.supported},
                                     {"requests", m.requests},
                                     {"masks", sol.masks}});
  std::printf("OF* = %.10g (supported %d/%d)\n", sol.objective, m.supported, m.requests);
  return kOk;
}

int cmd_train(const Options& o) {
  const json config = o.config.empty() ? json::object() : read_json(o.config);
  const auto s = scenario_for(o, config);
  auto agent = pira::agent_config_from_json(config.value("agent", json::object()));
  agent.alpha = s.alpha;
  agent.latency = s.latency;
  if (o.episodes) agent.episodes = *o.episodes;
  const std::uint64_t seed = o.seed ? *o.seed : config.value("seed", std::uint64_t{1});
  const fs::path dir = output_dir(o.out, "train");

  if (o.method == "rnd") {
    const auto res = pira::baseline_rnd(s.topology, s.catalog, s.workload, s.alpha, seed, s.latency);
    auto out = open_file(dir / "omega.csv");
    pira::write_allocation_trace(out, res.decisions);
    std::printf("OF = %.10g (supported %d/%d)\n", res.metrics.objective, res.metrics.supported, res.metrics.requests);
    return kOk;
  }
  if (o.method != "orient" && o.method != "flat") throw pira::ConfigError("unknown method '" + o.method + "'");
  const auto res = o.method == "flat" ? pira::baseline_flat_d3ql(s.topology, s.catalog, s.workload, agent, seed)
                                      : pira::run_training(s.topology, s.catalog, s.workload, agent, seed);
  {
    auto out = open_file(dir / "omega.csv");
    pira::write_allocation_trace(out, res.last_episode.decisions);
  }
  {
    auto out = open_file(dir / "evaluation.csv");
    pira::write_allocation_trace(out, res.evaluation.decisions);
  }
  {
    auto out = open_file(dir / "episodes.csv");
    pira::write_episode_metrics(out, res.episodes);
  }
  write_json(dir / "checkpoint.json", res.qf.to_json());
  const auto& m = res.evaluation.metrics;
  std::printf("OF = %.10g (supported %d/%d) after %d episodes\n", m.objective, m.supported, m.requests,
              agent.episodes);
  return kOk;
}

int cmd_sweep(const Options& o) {
  const json config = o.config.empty() ? json::object() : read_json(o.config);
  auto plan = pira::plan_from_json(config);
  if (o.seed) plan.base_seed = *o.seed;
  if (o.seeds) plan.seeds = *o.seeds;
  if (o.episodes) plan.agent.episodes = *o.episodes;
  if (o.workers) plan.workers = *o.workers;
  if (o.alpha) plan.scenario.alpha = *o.alpha;
  if (o.horizon) plan.scenario.horizon = *o.horizon;
  if (o.requests_total) plan.request_totals = {*o.requests_total};
  if (o.nodes) plan.node_counts = {*o.nodes};
  plan.validate();
  const std::string dir = output_dir(o.out.empty() ? plan.output_dir : o.out, "sweep");
  const auto table = pira::run_experiment(plan, [](const pira::MetricsRow& r) {
    std::fprintf(stderr, "%s %-6s OF=%.4f supported=%d %s\n", r.run_id.c_str(), r.method.c_str(), r.objective,
                 r.supported, r.status.c_str());
  });
  pira::export_table(table, dir);
  pira::write_plots(table.aggregates, (fs::path(dir) / "plots").string());
  std::printf("%zu runs -> %s\n", table.rows.size(), dir.c_str());
  return kOk;
}

int cmd_plot(const Options& o) {
  if (o.input.empty()) throw pira::ConfigError("plot needs --input summary.csv");
  std::ifstream in(o.input);
  if (!in) throw pira::ConfigError("cannot open '" + o.input + "'");
  const auto agg = pira::read_aggregate_csv(in);
  const auto files = pira::write_plots(agg, output_dir(o.out, "plot"));
  std::printf("%zu plots written\n", files.size());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef __GLIBC__
  // Training allocates and frees the same large buffers every step.
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
  CLI::App app{"Joint placement, routing and prioritisation: exact solver, learned allocator and baselines"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--config", o.config, "JSON configuration file");
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--out", o.out, "output directory (default: $PIRA_OUT/<command>)");
  };
  auto* gen = app.add_subcommand("gen", "generate a desk-scale scenario");
  common(gen);
  gen->add_option("--alpha", o.alpha, "energy weight");
  gen->add_option("--requests-total", o.requests_total, "requests over the horizon");
  gen->add_option("--horizon", o.horizon, "number of slots");
  gen->add_option("--nodes", o.nodes, "compute nodes");

  auto* solve = app.add_subcommand("solve", "exact optimum of a scenario");
  common(solve);
  solve->add_option("--scenario", o.scenario, "scenario JSON");
  solve->add_option("--alpha", o.alpha, "energy weight (overrides the scenario)");

  auto* train = app.add_subcommand("train", "train an agent on a scenario");
  common(train);
  train->add_option("--scenario", o.scenario, "scenario JSON");
  train->add_option("--alpha", o.alpha, "energy weight (overrides the scenario)");
  train->add_option("--method", o.method, "orient, flat or rnd")->check(CLI::IsMember({"orient", "flat", "rnd"}));
  train->add_option("--episodes", o.episodes, "training episodes");

  auto* sweep = app.add_subcommand("sweep", "run an experiment plan");
  common(sweep);
  sweep->add_option("--alpha", o.alpha, "energy weight");
  sweep->add_option("--horizon", o.horizon, "number of slots");
  sweep->add_option("--requests-total", o.requests_total, "restrict the grid to one request total");
  sweep->add_option("--nodes", o.nodes, "restrict the grid to one node count");
  sweep->add_option("--episodes", o.episodes, "training episodes");
  sweep->add_option("--seeds", o.seeds, "seeds per cell");
  sweep->add_option("--workers", o.workers, "parallel runs");

  auto* plot = app.add_subcommand("plot", "plot a summary CSV");
  common(plot);
  plot->add_option("--input", o.input, "summary.csv written by sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*gen) return cmd_gen(o);
    if (*solve) return cmd_solve(o);
    if (*train) return cmd_train(o);
    if (*sweep) return cmd_sweep(o);
    if (*plot) return cmd_plot(o);
  } catch (const pira::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
  return kOk;
}
