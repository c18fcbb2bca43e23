#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "json.hpp"
#include "pira/energy.hpp"
#include "pira/features.hpp"
#include "pira/qfunction.hpp"

namespace pira {

struct AgentConfig {
  double gamma = 0.9;
  double epsilon_start = 1.0;
  double epsilon_decay = 1e-3;    // subtracted after every decision
  double epsilon_floor = 0.05;
  int replay_capacity = 10000;
  int batch_size = 32;
  int warmup = 32;                // transitions stored before training starts
  int target_sync = 200;          // decisions between target-network copies
  double step_size = 0.01;
  double alpha = 0.001;
  int episodes = 300;
  /// Greedy selection restricted to feasible actions.
  bool mask_infeasible = false;
  /// Reward M / (OF(a) - min OF) exactly as printed instead of the normalised form.
  bool literal_reward = false;
  /// Run a final pass with epsilon = 0 and no learning; its trace is the reported one.
  bool greedy_evaluation = true;
  Architecture architecture;
  OptimizerConfig optimizer;
  LatencyModel latency;

  /// Throws ConfigError when a field is outside its admissible range.
  void validate() const;
};

nlohmann::json agent_config_to_json(const AgentConfig& config);
/// Missing keys keep the values of `base`.
AgentConfig agent_config_from_json(const nlohmann::json& doc, const AgentConfig& base = {});

/// Smallest reward given to a feasible action, so that a request is
/// connected exactly when its action passes the audit.
inline constexpr double kFeasibleRewardFloor = 1e-6;

/// Profit minus alpha times the energy the action would add: transmission,
/// service, and the boot charge when the chosen node is currently idle.
double action_objective(const AllocationState& state, const Request& request, const Action& action, double alpha);

/// Lowest and highest action_objective over the whole action space,
/// feasibility ignored.
std::pair<double, double> objective_bounds(const AllocationState& state, const Request& request, double alpha);

/// Zero when the action violates any of C1-C18; otherwise the action's
/// objective normalised by the bounds over the action space (floored at
/// kFeasibleRewardFloor). Degenerate bounds give 1 for feasible actions.
double compute_reward(const AllocationState& state, const Request& request, const Action& action, double alpha,
                      const LatencyModel& model = {}, bool literal = false);

/// Index of the largest entry, ties to the lowest index; entries where
/// `mask` is false are skipped. nullopt when nothing is eligible.
std::optional<int> greedy_action(const Eigen::VectorXd& q, const std::vector<std::uint8_t>* mask = nullptr);

/// Epsilon-greedy choice over the action space. The random branch is
/// uniform over every action; the mask only restricts the greedy branch.
/// nullopt means the request is rejected (greedy with nothing eligible).
std::optional<int> select_action(const QFunction& qf, const StateFeatures& features, double epsilon, Rng& rng,
                                 const std::vector<std::uint8_t>* mask = nullptr);

/// Feasibility (C1-C18) of every action index for `request`.
std::vector<std::uint8_t> feasibility_mask(const AllocationState& state, const Request& request,
                                           const LatencyModel& model = {});

struct Transition {
  std::shared_ptr<const StateFeatures> state;
  int action = 0;
  double reward = 0.0;
  std::shared_ptr<const StateFeatures> next;   // null at the end of the horizon

  bool terminal() const { return next == nullptr; }
};

/// r + gamma * q_target[argmax q_main], or r when terminal.
double double_q_target(double reward, bool terminal, const Eigen::VectorXd& q_main_next,
                       const Eigen::VectorXd& q_target_next, double gamma);
double compute_target(const QFunction& main, const QFunction& target, const Transition& transition, double gamma);

/// Fixed-capacity experience memory; the oldest entry is overwritten first.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return items_[i]; }
  /// Uniform indices with replacement.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

struct EpisodeMetrics {
  int episode = 0;
  double epsilon = 0.0;   // at the end of the episode
  double mean_loss = 0.0;
  RunMetrics metrics;
};

/// Decisions, accepted allocations and metrics of one pass over the horizon.
struct Rollout {
  std::vector<DecisionRecord> decisions;
  Trace trace;
  RunMetrics metrics;
};

struct TrainingResult {
  QFunction qf;
  std::vector<EpisodeMetrics> episodes;
  Rollout last_episode;   // the final learning pass
  Rollout evaluation;     // greedy pass when enabled, otherwise equal to last_episode
  long decisions = 0;
  long target_syncs = 0;
};

/// What the learner looks like right after one decision has been processed.
struct StepView {
  int episode = 0;
  long decision = 0;   // 1-based count over the whole run
  std::optional<int> action;
  double reward = 0.0;
  double epsilon = 0.0;   // after the decay of this step
  bool synced = false;    // target copied from main at this step
  const QFunction* main = nullptr;
  const QFunction* target = nullptr;
  const ReplayMemory* memory = nullptr;
};

using StepObserver = std::function<void(const StepView&)>;

/// Deep double dueling Q-learning over `config.episodes` passes of the
/// workload. A request is connected exactly when its reward is positive.
TrainingResult run_training(const Topology& topology, const ServiceCatalog& catalog, const Workload& workload,
                            const AgentConfig& config, std::uint64_t seed, const StepObserver& on_step = nullptr);

/// One pass with a fixed policy and no learning.
Rollout greedy_rollout(const Topology& topology, const ServiceCatalog& catalog, const Workload& workload,
                       const QFunction& qf, const AgentConfig& config);

/// Uniform random action per request; only actions passing C1-C18 are established.
Rollout baseline_rnd(const Topology& topology, const ServiceCatalog& catalog, const Workload& workload,
                     double alpha, std::uint64_t seed, const LatencyModel& model = {});

/// run_training with a dense-only network on the flattened state.
TrainingResult baseline_flat_d3ql(const Topology& topology, const ServiceCatalog& catalog, const Workload& workload,
                                  AgentConfig config, std::uint64_t seed, const StepObserver& on_step = nullptr);

/// CSV episode,epsilon,mean_loss,total_profit,total_energy,OF,supported,requests.
void write_episode_metrics(std::ostream& out, const std::vector<EpisodeMetrics>& rows);

}  // namespace pira
