#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "pira/agent.hpp"
#include "pira/oracle.hpp"
#include "pira/scenario.hpp"

namespace pira {

inline const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m{"oracle", "orient", "flat", "rnd"};
  return m;
}

/// Narrower networks and batches than AgentConfig{} so a full grid fits
/// on one core.
AgentConfig sweep_agent_defaults();

/// Grid of desk scenarios x methods x seeds.
struct ExperimentPlan {
  std::vector<int> node_counts{2, 3, 4};
  std::vector<int> request_totals{5, 10, 20};
  std::vector<std::string> methods{"oracle", "orient", "flat", "rnd"};
  int seeds = 10;
  std::uint64_t base_seed = 1;
  DeskScenarioConfig scenario;   // nodes, requests_total and seed are set per run
  AgentConfig agent = sweep_agent_defaults();   // shared by orient and flat
  OracleBounds bounds;
  int workers = 1;
  std::string output_dir;

  void validate() const;
};

nlohmann::json plan_to_json(const ExperimentPlan& plan);
/// Missing keys keep their defaults. Throws ConfigError on unknown methods.
ExperimentPlan plan_from_json(const nlohmann::json& doc);

/// One (cell, method, seed) outcome.
struct MetricsRow {
  std::string run_id;
  std::string method;
  int devices = 0;   // N
  int nodes = 0;     // V
  int requests = 0;  // R
  std::uint64_t seed = 0;
  double total_profit = 0.0;
  double total_energy = 0.0;
  double objective = 0.0;
  double mean_energy_per_supported = 0.0;
  int supported = 0;
  std::string status = "ok";   // ok, skipped, failed

  bool operator==(const MetricsRow&) const = default;
};

struct AggregateRow {
  std::string method;
  int devices = 0;
  int nodes = 0;
  int requests = 0;
  int runs = 0;
  double objective_mean = 0.0, objective_std = 0.0;
  double profit_mean = 0.0, profit_std = 0.0;
  double energy_mean = 0.0, energy_std = 0.0;
  double energy_per_supported_mean = 0.0, energy_per_supported_std = 0.0;
  double supported_mean = 0.0;

  bool operator==(const AggregateRow&) const = default;
};

struct MetricsTable {
  std::vector<MetricsRow> rows;
  std::vector<AggregateRow> aggregates;
};

/// Mean and sample standard deviation of the ok rows of every (method, cell).
std::vector<AggregateRow> aggregate(const std::vector<MetricsRow>& rows);

using ProgressFn = std::function<void(const MetricsRow&)>;

/// Runs every cell; a failing run is recorded with status "failed" and the
/// sweep continues. Oracle runs above the bounds are recorded as "skipped".
MetricsTable run_experiment(const ExperimentPlan& plan, const ProgressFn& progress = nullptr);

/// Runs one method on one scenario.
MetricsRow run_method(const Scenario& scenario, const std::string& method, const AgentConfig& agent,
                      const OracleBounds& bounds, std::uint64_t seed);

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics_csv(std::istream& in);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> read_aggregate_csv(std::istream& in);

/// Writes metrics.csv and summary.csv into `dir` (created if needed).
void export_table(const MetricsTable& table, const std::string& dir);

/// One SVG per plotted metric per sweep axis (V and R); returns the paths written.
std::vector<std::string> write_plots(const std::vector<AggregateRow>& aggregates, const std::string& dir);

}  // namespace pira
