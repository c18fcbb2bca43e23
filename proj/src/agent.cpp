#include "pira/agent.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

namespace pira {

void AgentConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("agent config: " + what); };
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must lie in [0, 1]");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0)) fail("epsilon_start must lie in [0, 1]");
  if (!(epsilon_floor > 0.0 && epsilon_floor <= 1.0)) fail("epsilon_floor must lie in (0, 1]");
  if (!(epsilon_decay > 0.0)) fail("epsilon_decay must be positive");
  if (replay_capacity <= 0) fail("replay_capacity must be positive");
  if (batch_size <= 0) fail("batch_size must be positive");
  if (warmup < 0) fail("warmup must be non-negative");
  if (target_sync <= 0) fail("target_sync must be positive");
  if (!(step_size > 0.0)) fail("step_size must be positive");
  if (!(alpha >= 0.0)) fail("alpha must be non-negative");
  if (episodes < 0) fail("episodes must be non-negative");
}

nlohmann::json agent_config_to_json(const AgentConfig& c) {
  return {{"gamma", c.gamma},
          {"epsilon_start", c.epsilon_start},
          {"epsilon_decay", c.epsilon_decay},
          {"epsilon_floor", c.epsilon_floor},
          {"replay_capacity", c.replay_capacity},
          {"batch_size", c.batch_size},
          {"warmup", c.warmup},
          {"target_sync", c.target_sync},
          {"step_size", c.step_size},
          {"alpha", c.alpha},
          {"episodes", c.episodes},
          {"mask_infeasible", c.mask_infeasible},
          {"literal_reward", c.literal_reward},
          {"greedy_evaluation", c.greedy_evaluation},
          {"architecture", architecture_to_json(c.architecture)},
          {"optimizer",
           {{"kind", c.optimizer.kind == OptimizerConfig::Kind::Adam ? "adam" : "sgd"},
            {"beta1", c.optimizer.beta1},
            {"beta2", c.optimizer.beta2},
            {"epsilon", c.optimizer.epsilon},
            {"clip_norm", c.optimizer.clip_norm}}},
          {"latency", {{"scale", c.latency.scale}, {"c15_aggregate_load", c.latency.c15_aggregate_load}}}};
}

AgentConfig agent_config_from_json(const nlohmann::json& doc, const AgentConfig& base) {
  AgentConfig c = base;
  try {
    c.gamma = doc.value("gamma", c.gamma);
    c.epsilon_start = doc.value("epsilon_start", c.epsilon_start);
    c.epsilon_decay = doc.value("epsilon_decay", c.epsilon_decay);
    c.epsilon_floor = doc.value("epsilon_floor", c.epsilon_floor);
    c.replay_capacity = doc.value("replay_capacity", c.replay_capacity);
    c.batch_size = doc.value("batch_size", c.batch_size);
    c.warmup = doc.value("warmup", c.warmup);
    c.target_sync = doc.value("target_sync", c.target_sync);
    c.step_size = doc.value("step_size", c.step_size);
    c.alpha = doc.value("alpha", c.alpha);
    c.episodes = doc.value("episodes", c.episodes);
    c.mask_infeasible = doc.value("mask_infeasible", c.mask_infeasible);
    c.literal_reward = doc.value("literal_reward", c.literal_reward);
    c.greedy_evaluation = doc.value("greedy_evaluation", c.greedy_evaluation);
    if (doc.contains("architecture")) c.architecture = architecture_from_json(doc["architecture"], c.architecture);
    if (doc.contains("optimizer")) {
      const auto& o = doc["optimizer"];
      const std::string kind = o.value("kind", std::string("sgd"));
      if (kind == "adam")
        c.optimizer.kind = OptimizerConfig::Kind::Adam;
      else if (kind == "sgd")
        c.optimizer.kind = OptimizerConfig::Kind::Sgd;
      else
        throw ConfigError("unknown optimizer '" + kind + "'");
      c.optimizer.beta1 = o.value("beta1", c.optimizer.beta1);
      c.optimizer.beta2 = o.value("beta2", c.optimizer.beta2);
      c.optimizer.epsilon = o.value("epsilon", c.optimizer.epsilon);
      c.optimizer.clip_norm = o.value("clip_norm", c.optimizer.clip_norm);
    }
    if (doc.contains("latency")) {
      c.latency.scale = doc["latency"].value("scale", c.latency.scale);
      c.latency.c15_aggregate_load = doc["latency"].value("c15_aggregate_load", c.latency.c15_aggregate_load);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("agent config: ") + e.what());
  }
  c.validate();
  return c;
}

double action_objective(const AllocationState& state, const Request& r, const Action& a, double alpha) {
  const auto& t = state.topology();
  double energy = marginal_energy(t, r, a);
  if (!state.node_active(a.node)) energy += t.nodes[a.node].energy_per_transition;
  return r.profit - alpha * energy;
}

std::pair<double, double> objective_bounds(const AllocationState& state, const Request& r, double alpha) {
  const auto& t = state.topology();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  // Instance and priority do not change the objective; scan node x path.
  for (int v = 0; v < t.node_count(); ++v)
    for (int p = 0; p < t.path_count(); ++p) {
      const double of = action_objective(state, r, Action{0, v, p, 0}, alpha);
      lo = std::min(lo, of);
      hi = std::max(hi, of);
    }
  return {lo, hi};
}

namespace {

struct Outcome {
  double reward = 0.0;
  Verdict verdict;
};

Outcome evaluate_action(const AllocationState& state, const Request& r, const Action& a, double alpha,
                        const LatencyModel& model, bool literal) {
  Outcome out;
  out.verdict = check_admission(state, r, a, model);
  if (!out.verdict.feasible()) return out;
  const auto [lo, hi] = objective_bounds(state, r, alpha);
  const double of = action_objective(state, r, a, alpha);
  if (!(hi > lo)) {
    out.reward = 1.0;
  } else if (literal) {
    out.reward = of > lo ? (hi - lo) / (of - lo) : 1.0;
  } else {
    out.reward = std::max(kFeasibleRewardFloor, std::clamp((of - lo) / (hi - lo), 0.0, 1.0));
  }
  return out;
}

}  // namespace

double compute_reward(const AllocationState& state, const Request& r, const Action& a, double alpha,
                      const LatencyModel& model, bool literal) {
  return evaluate_action(state, r, a, alpha, model, literal).reward;
}

std::optional<int> greedy_action(const Eigen::VectorXd& q, const std::vector<std::uint8_t>* mask) {
  std::optional<int> best;
  for (Eigen::Index a = 0; a < q.size(); ++a) {
    if (mask && !(*mask)[a]) continue;
    if (!best || q[a] > q[*best]) best = static_cast<int>(a);
  }
  return best;
}

std::optional<int> select_action(const QFunction& qf, const StateFeatures& f, double epsilon, Rng& rng,
                                 const std::vector<std::uint8_t>* mask) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon outside [0, 1]");
  const int n = qf.action_count();
  if (n <= 0) throw Error("empty action space");
  const double zeta = rng.uniform01();
  if (zeta < epsilon) return static_cast<int>(rng.index(static_cast<std::size_t>(n)));
  return greedy_action(qf.q_values(f), mask);
}

std::vector<std::uint8_t> feasibility_mask(const AllocationState& state, const Request& r, const LatencyModel& model) {
  const ActionSpace space(state.topology(), state.catalog());
  std::vector<std::uint8_t> mask(space.size(), 0);
  for (int a = 0; a < space.size(); ++a) mask[a] = check_admission(state, r, space.action(a), model).feasible();
  return mask;
}

double double_q_target(double reward, bool terminal, const Eigen::VectorXd& q_main_next,
                       const Eigen::VectorXd& q_target_next, double gamma) {
  if (terminal) return reward;
  const auto a = greedy_action(q_main_next);
  if (!a) return reward;
  return reward + gamma * q_target_next[*a];
}

double compute_target(const QFunction& main, const QFunction& target, const Transition& tr, double gamma) {
  if (tr.terminal()) return tr.reward;
  return double_q_target(tr.reward, false, main.q_values(*tr.next), target.q_values(*tr.next), gamma);
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayMemory::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
  }
}

std::vector<std::size_t> ReplayMemory::sample_indices(std::size_t n, Rng& rng) const {
  if (items_.empty()) throw Error("sampling from an empty replay memory");
  std::vector<std::size_t> out(n);
  for (auto& i : out) i = rng.index(items_.size());
  return out;
}

namespace {

using Policy = std::function<std::optional<int>(const AllocationState&, const Request&,
                                                const std::shared_ptr<const StateFeatures>&)>;
using Observer = std::function<void(const std::shared_ptr<const StateFeatures>&, std::optional<int>, double)>;

/// One pass over the horizon. `encoder` may be null when the policy needs
/// no features. `observe` sees (features, action, reward) after each decision.
Rollout run_pass(const Topology& topology, const ServiceCatalog& catalog, const Workload& workload, double alpha,
                 const LatencyModel& model, bool literal, const StateEncoder* encoder, const Policy& policy,
                 const Observer& observe) {
  const ActionSpace space(topology, catalog);
  Rollout out;
  AllocationState state(topology, catalog, 1);
  for (int t = 1; t <= workload.horizon(); ++t) {
    for (const auto& r : workload.slots[t - 1]) {
      std::shared_ptr<const StateFeatures> f;
      if (encoder) f = std::make_shared<const StateFeatures>(encoder->encode(state, r));
      const auto choice = policy(state, r, f);
      DecisionRecord rec{t, r.id, std::nullopt, false, {}};
      double reward = 0.0;
      if (choice) {
        const Action a = space.action(*choice);
        const auto o = evaluate_action(state, r, a, alpha, model, literal);
        reward = o.reward;
        rec.action = a;
        rec.violated = o.verdict.violated;
        if (reward > 0.0) {
          state.apply(r, a);
          rec.accepted = true;
        }
      }
      out.decisions.push_back(std::move(rec));
      if (observe) observe(f, choice, reward);
    }
    out.trace.slots.push_back(record_slot(state));
    state = state.advance();
  }
  out.metrics = evaluate_trace(topology, out.trace, alpha, workload.request_count());
  return out;
}

}  // namespace

Rollout greedy_rollout(const Topology& topology, const ServiceCatalog& catalog, const Workload& workload,
                       const QFunction& qf, const AgentConfig& config) {
  const StateEncoder encoder(topology, catalog, config.latency);
  const auto policy = [&](const AllocationState& state, const Request& r,
                          const std::shared_ptr<const StateFeatures>& f) -> std::optional<int> {
    if (config.mask_infeasible) {
      const auto mask = feasibility_mask(state, r, config.latency);
      return greedy_action(qf.q_values(*f), &mask);
    }
    return greedy_action(qf.q_values(*f));
  };
  return run_pass(topology, catalog, workload, config.alpha, config.latency, config.literal_reward, &encoder, policy,
                  nullptr);
}

TrainingResult run_training(const Topology& topology, const ServiceCatalog& catalog, const Workload& workload,
                            const AgentConfig& config, std::uint64_t seed, const StepObserver& on_step) {
  config.validate();
  Rng master(seed);
  const StateEncoder encoder(topology, catalog, config.latency);
  TrainingResult res{QFunction(encoder.shape(), config.architecture, master.fork(), config.optimizer), {}, {}, {}, 0, 0};
  QFunction& qf = res.qf;
  QFunction target = qf;
  Rng policy_rng(master.fork());
  Rng replay_rng(master.fork());
  ReplayMemory memory(static_cast<std::size_t>(config.replay_capacity));
  double epsilon = config.epsilon_start;

  for (int ep = 0; ep < config.episodes; ++ep) {
    std::optional<Transition> pending;
    double loss_sum = 0.0;
    int loss_count = 0;

    const auto policy = [&](const AllocationState& state, const Request& r,
                            const std::shared_ptr<const StateFeatures>& f) -> std::optional<int> {
      if (config.mask_infeasible) {
        const auto mask = feasibility_mask(state, r, config.latency);
        return select_action(qf, *f, epsilon, policy_rng, &mask);
      }
      return select_action(qf, *f, epsilon, policy_rng);
    };

    const auto observe = [&](const std::shared_ptr<const StateFeatures>& f, std::optional<int> action,
                             double reward) {
      if (pending) {
        pending->next = f;
        memory.push(std::move(*pending));
        pending.reset();
      }
      if (action) pending = Transition{f, *action, reward, nullptr};

      if (memory.size() > 0 && memory.size() >= static_cast<std::size_t>(config.warmup)) {
        const auto idx = memory.sample_indices(static_cast<std::size_t>(config.batch_size), replay_rng);
        std::vector<TrainSample> batch;
        std::vector<const StateFeatures*> next;
        batch.reserve(idx.size());
        for (std::size_t i : idx) {
          const auto& tr = memory[i];
          batch.push_back({tr.state.get(), tr.action, tr.reward});
          if (!tr.terminal()) next.push_back(tr.next.get());
        }
        if (!next.empty()) {
          const Eigen::MatrixXd qm = qf.q_values(next), qt = target.q_values(next);
          Eigen::Index row = 0;
          for (std::size_t b = 0; b < idx.size(); ++b) {
            if (memory[idx[b]].terminal()) continue;
            batch[b].target = double_q_target(batch[b].target, false, qm.row(row).transpose(),
                                              qt.row(row).transpose(), config.gamma);
            ++row;
          }
        }
        const auto step = qf.train_step(batch, config.step_size);
        if (!std::isfinite(step.loss)) {
          std::ostringstream msg;
          msg << "training diverged at episode " << ep << ", decision " << res.decisions << ": loss = " << step.loss;
          throw Error(msg.str());
        }
        loss_sum += step.loss;
        ++loss_count;
      }

      if (epsilon > config.epsilon_floor) epsilon = std::max(config.epsilon_floor, epsilon - config.epsilon_decay);
      ++res.decisions;
      const bool sync = res.decisions % config.target_sync == 0;
      if (sync) {
        target.copy_weights_from(qf);
        ++res.target_syncs;
      }
      if (on_step) on_step({ep, res.decisions, action, reward, epsilon, sync, &qf, &target, &memory});
    };

    res.last_episode = run_pass(topology, catalog, workload, config.alpha, config.latency, config.literal_reward,
                                &encoder, policy, observe);
    if (pending) memory.push(std::move(*pending));
    res.episodes.push_back({ep, epsilon, loss_count > 0 ? loss_sum / loss_count : 0.0, res.last_episode.metrics});
  }

  if (config.greedy_evaluation)
    res.evaluation = greedy_rollout(topology, catalog, workload, qf, config);
  else
    res.evaluation = res.last_episode;
  return res;
}

Rollout baseline_rnd(const Topology& topology, const ServiceCatalog& catalog, const Workload& workload, double alpha,
                     std::uint64_t seed, const LatencyModel& model) {
  const ActionSpace space(topology, catalog);
  Rng rng(seed);
  const auto policy = [&](const AllocationState&, const Request&,
                          const std::shared_ptr<const StateFeatures>&) -> std::optional<int> {
    if (space.size() == 0) return std::nullopt;
    return static_cast<int>(rng.index(static_cast<std::size_t>(space.size())));
  };
  return run_pass(topology, catalog, workload, alpha, model, false, nullptr, policy, nullptr);
}

TrainingResult baseline_flat_d3ql(const Topology& topology, const ServiceCatalog& catalog, const Workload& workload,
                                  AgentConfig config, std::uint64_t seed, const StepObserver& on_step) {
  config.architecture.kind = Architecture::Kind::Flat;
  return run_training(topology, catalog, workload, config, seed, on_step);
}

void write_episode_metrics(std::ostream& out, const std::vector<EpisodeMetrics>& rows) {
  out << "episode,epsilon,mean_loss,total_profit,total_energy,OF,supported,requests\n";
  out.precision(17);
  for (const auto& e : rows)
    out << e.episode << ',' << e.epsilon << ',' << e.mean_loss << ',' << e.metrics.total_profit << ','
        << e.metrics.total_energy << ',' << e.metrics.objective << ',' << e.metrics.supported << ','
        << e.metrics.requests << '\n';
}

}  // namespace pira
