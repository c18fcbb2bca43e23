#include "pira/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "pira/common.hpp"

namespace pira {

void check_oracle_bounds(const Topology& topology, const ServiceCatalog& catalog,
                         const Workload& workload, const OracleBounds& bounds) {
  const ActionSpace space(topology, catalog);
  auto refuse = [&](const std::string& why, int requests) {
    std::ostringstream msg;
    msg << "exact solver refuses this instance: " << why << " (|A| = " << space.size()
        << ", V = " << topology.node_count() << ", up to " << requests
        << " requests per slot; joint options per slot ~ (|A|+1)^R = "
        << std::pow(static_cast<double>(space.size()) + 1.0, requests) << ")";
    throw SizeLimitExceeded(msg.str());
  };
  int widest = 0;
  for (const auto& s : workload.slots) widest = std::max(widest, static_cast<int>(s.size()));
  if (topology.node_count() > bounds.max_nodes) refuse("too many compute nodes", widest);
  if (space.size() > bounds.max_actions) refuse("action space too large", widest);
  if (widest > bounds.max_requests_per_slot) refuse("too many requests in one slot", widest);
}

namespace {

struct Placement {
  int node;
  int path;
  double energy;
};

class SlotSearch {
 public:
  SlotSearch(const Topology& t, const ServiceCatalog& c, const std::vector<Request>& reqs, double alpha,
             const LatencyModel& model, std::uint32_t mask)
      : t_(t), c_(c), reqs_(reqs), alpha_(alpha), model_(model), mask_(mask) {
    const int R = static_cast<int>(reqs.size());
    const int slot = R > 0 ? reqs.front().arrival_slot : 1;
    stack_.assign(R + 1, AllocationState(t, c, slot));
    current_.assign(R, std::nullopt);

    // Interchangeable instances: same service and capacity.
    class_of_.resize(c.instance_count());
    for (int i = 0; i < c.instance_count(); ++i) {
      class_of_[i] = i;
      for (int j = 0; j < i; ++j)
        if (c.instances[j].service == c.instances[i].service &&
            c.instances[j].capacity == c.instances[i].capacity) {
          class_of_[i] = class_of_[j];
          break;
        }
    }

    services_ = c.services();
    instances_of_.resize(services_.size());
    for (int i = 0; i < c.instance_count(); ++i)
      for (std::size_t k = 0; k < services_.size(); ++k)
        if (c.instances[i].service == services_[k]) instances_of_[k].push_back(i);
    pending_.assign(R + 1, std::vector<int>(services_.size(), 0));
    for (int j = R - 1; j >= 0; --j) {
      pending_[j] = pending_[j + 1];
      for (std::size_t k = 0; k < services_.size(); ++k)
        if (reqs[j].service == services_[k]) ++pending_[j][k];
    }

    placements_.resize(R);
    suffix_bound_.assign(R + 1, 0.0);
    for (int j = 0; j < R; ++j) {
      const auto& r = reqs[j];
      for (int v = 0; v < t.node_count(); ++v) {
        if (!(mask & (1u << v))) continue;
        for (int p : t.paths_serving(r.poa, v))
          placements_[j].push_back({v, p, marginal_energy(t, r, Action{0, v, p, 0})});
      }
      std::stable_sort(placements_[j].begin(), placements_[j].end(),
                       [](const Placement& a, const Placement& b) { return a.energy < b.energy; });
    }
    for (int j = R - 1; j >= 0; --j) {
      double gain = 0.0;
      if (!placements_[j].empty())
        gain = std::max(0.0, reqs[j].profit - alpha * placements_[j].front().energy);
      suffix_bound_[j] = suffix_bound_[j + 1] + gain;
    }
  }

  std::optional<SlotSolution> run() {
    dfs(0, 0.0, 0.0);
    return best_;
  }

 private:
  bool canonical(const AllocationState& st, int i) const {
    for (int j = 0; j < i; ++j)
      if (class_of_[j] == class_of_[i] && !st.instance_host(j)) return false;
    return true;
  }

  std::uint32_t active_mask(const AllocationState& st) const {
    std::uint32_t m = 0;
    for (int v = 0; v < t_.node_count(); ++v)
      if (st.node_active(v)) m |= 1u << v;
    return m;
  }

  // Nodes the remaining requests could still switch on: each needs a
  // request whose service still has an idle instance.
  int activatable(const AllocationState& st, int j) const {
    int total = 0;
    for (std::size_t s = 0; s < services_.size(); ++s) {
      int idle = 0;
      for (int i : instances_of_[s])
        if (!st.instance_host(i)) ++idle;
      total += std::min(idle, pending_[j][s]);
    }
    return total;
  }

  void dfs(int j, double profit, double energy) {
    const int R = static_cast<int>(reqs_.size());
    const AllocationState& st = stack_[j];
    const double value = profit - alpha_ * energy;
    const std::uint32_t active = active_mask(st);
    if (j == R) {
      if (active == mask_ && (!best_ || value > best_->value))
        best_ = SlotSolution{mask_, current_, profit, energy, value};
      return;
    }
    if (std::popcount(mask_ & ~active) > activatable(st, j)) return;
    if (best_ && value + suffix_bound_[j] <= best_->value) return;

    const auto& r = reqs_[j];
    for (const auto& pl : placements_[j]) {
      for (int i = 0; i < c_.instance_count(); ++i) {
        if (c_.instances[i].service != r.service) continue;
        const auto host = st.instance_host(i);
        if (host ? *host != pl.node : !canonical(st, i)) continue;
        for (int k = 0; k < t_.priority_levels; ++k) {
          const Action a{i, pl.node, pl.path, k};
          if (!st.check(r, a).feasible()) continue;
          AllocationState& next = stack_[j + 1];
          next = st;
          next.apply(r, a);
          if (!deadlines_met(next, model_)) continue;
          current_[j] = a;
          dfs(j + 1, profit + r.profit, energy + pl.energy);
          current_[j].reset();
        }
      }
    }
    stack_[j + 1] = st;
    dfs(j + 1, profit, energy);
  }

  const Topology& t_;
  const ServiceCatalog& c_;
  const std::vector<Request>& reqs_;
  double alpha_;
  LatencyModel model_;
  std::uint32_t mask_;
  std::vector<AllocationState> stack_;
  std::vector<std::optional<Action>> current_;
  std::vector<int> class_of_;
  std::vector<int> services_;
  std::vector<std::vector<int>> instances_of_;
  std::vector<std::vector<int>> pending_;   // pending_[j][s]: requests j.. of service s
  std::vector<std::vector<Placement>> placements_;
  std::vector<double> suffix_bound_;
  std::optional<SlotSolution> best_;
};

double transition_cost(const Topology& t, std::uint32_t from, std::uint32_t to) {
  double e = 0.0;
  for (int v = 0; v < t.node_count(); ++v)
    if (((from ^ to) >> v) & 1u) e += t.nodes[v].energy_per_transition;
  return e;
}

}  // namespace

std::vector<SlotSolution> solve_slot(const Topology& topology, const ServiceCatalog& catalog,
                                     const std::vector<Request>& requests, double alpha,
                                     const LatencyModel& model, const OracleBounds& bounds) {
  check_oracle_bounds(topology, catalog, Workload{{requests}}, bounds);
  for (const auto& r : requests)
    if (r.arrival_slot != requests.front().arrival_slot)
      throw Error("solve_slot: requests from different slots");
  std::vector<SlotSolution> out;
  const std::uint32_t masks = 1u << topology.node_count();
  for (std::uint32_t m = 0; m < masks; ++m) {
    SlotSearch search(topology, catalog, requests, alpha, model, m);
    if (auto s = search.run()) out.push_back(std::move(*s));
  }
  return out;
}

HorizonSolution solve_horizon(const Topology& topology, const ServiceCatalog& catalog,
                              const Workload& workload, double alpha, const LatencyModel& model,
                              const OracleBounds& bounds) {
  check_oracle_bounds(topology, catalog, workload, bounds);
  const int T = workload.horizon();
  const std::uint32_t masks = 1u << topology.node_count();
  const double ninf = -std::numeric_limits<double>::infinity();

  std::vector<std::vector<std::optional<SlotSolution>>> by_mask(T, std::vector<std::optional<SlotSolution>>(masks));
  for (int t = 0; t < T; ++t)
    for (auto& s : solve_slot(topology, catalog, workload.slots[t], alpha, model, bounds))
      by_mask[t][s.mask] = std::move(s);

  std::vector<double> value(masks, ninf), next(masks);
  value[0] = 0.0;
  std::vector<std::vector<std::uint32_t>> parent(T, std::vector<std::uint32_t>(masks, 0));
  for (int t = 0; t < T; ++t) {
    std::fill(next.begin(), next.end(), ninf);
    for (std::uint32_t g = 0; g < masks; ++g) {
      if (!by_mask[t][g]) continue;
      for (std::uint32_t prev = 0; prev < masks; ++prev) {
        if (value[prev] == ninf) continue;
        const double v = value[prev] - alpha * transition_cost(topology, prev, g) + by_mask[t][g]->value;
        if (v > next[g]) {
          next[g] = v;
          parent[t][g] = prev;
        }
      }
    }
    value.swap(next);
  }

  HorizonSolution sol;
  std::uint32_t g = 0;
  double best = T == 0 ? 0.0 : ninf;
  for (std::uint32_t m = 0; m < masks && T > 0; ++m)
    if (value[m] > best) {
      best = value[m];
      g = m;
    }
  sol.objective = best;
  sol.masks.assign(T, 0);
  for (int t = T - 1; t >= 0; --t) {
    sol.masks[t] = g;
    g = parent[t][g];
  }
  for (int t = 0; t < T; ++t) {
    const auto& s = *by_mask[t][sol.masks[t]];
    SlotRecord rec;
    rec.slot = t + 1;
    for (std::size_t j = 0; j < s.actions.size(); ++j)
      if (s.actions[j]) rec.accepted.push_back({workload.slots[t][j], *s.actions[j]});
    rec.activation = activation_of(topology.node_count(), rec.accepted);
    sol.trace.slots.push_back(std::move(rec));
  }
  return sol;
}

}  // namespace pira
