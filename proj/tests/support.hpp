#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "pira/agent.hpp"
#include "pira/audit.hpp"
#include "pira/oracle.hpp"
#include "pira/scenario.hpp"

namespace testing {

using nlohmann::json;

/// Devices 0..n-1 in a line, link j joining j and j+1, explicit capacities.
inline json line_spec(int devices, int levels = 1, double bandwidth = 100.0) {
  json d = json::array(), l = json::array();
  for (int n = 0; n < devices; ++n)
    d.push_back(json::object({{"bandwidth", bandwidth}, {"energy_per_unit", 1.0}, {"edge", n == 0}}));
  for (int n = 0; n + 1 < devices; ++n)
    l.push_back(json::object({{"endpoints", {n, n + 1}}, {"bandwidth", bandwidth}}));
  return {{"priority_levels", levels}, {"devices", d}, {"links", l}, {"nodes", json::array()}, {"paths_per_pair", 2}};
}

inline json node_spec(int device, double capacity, double unit = 1.0, double transition = 0.0) {
  return {{"device", device}, {"capacity", capacity}, {"energy_per_unit", unit},
          {"energy_per_transition", transition}};
}

inline pira::Request request(int id, int poa, int service, double cap, double bw, double deadline,
                             double profit = 10.0, int slot = 1) {
  pira::Request r;
  r.id = id;
  r.arrival_slot = slot;
  r.poa = poa;
  r.service = service;
  r.min_capacity = cap;
  r.min_bandwidth = bw;
  r.max_latency = deadline;
  r.packet_size = 1.0;
  r.profit = profit;
  return r;
}

/// Small random desk scenario with tight resources so that constraints bind.
inline pira::Scenario random_scenario(pira::Rng& rng, int nodes, int horizon, int requests_total) {
  pira::DeskScenarioConfig c;
  c.nodes = nodes;
  c.horizon = horizon;
  c.requests_total = requests_total;
  c.priority_levels = static_cast<int>(rng.uniform_int(1, 3));
  c.services = static_cast<int>(rng.uniform_int(1, 2));
  c.replicas = static_cast<int>(rng.uniform_int(1, 2));
  c.instance_capacity = static_cast<double>(rng.uniform_int(8, 20));
  c.seed = rng.next();
  return pira::make_desk_scenario(c);
}

/// Uniformly random action in the scenario's action space.
inline pira::Action random_action(const pira::ActionSpace& space, pira::Rng& rng) {
  return space.action(static_cast<int>(rng.index(static_cast<std::size_t>(space.size()))));
}

/// Applies random admissible actions to the requests of slot `t`.
inline pira::AllocationState random_state(const pira::Scenario& s, pira::Rng& rng, int tries = 40) {
  pira::AllocationState st(s.topology, s.catalog, 1);
  const pira::ActionSpace space(s.topology, s.catalog);
  for (const auto& r : s.workload.slots.front())
    for (int k = 0; k < tries; ++k) {
      const auto a = random_action(space, rng);
      if (pira::check_admission(st, r, a, s.latency).feasible()) {
        st.apply(r, a);
        break;
      }
    }
  return st;
}

/// Best objective over every joint assignment of the whole horizon, found by
/// depth-first enumeration with the independent slot audit as the only
/// feasibility test. No per-slot decomposition, no dynamic program.
inline double exhaustive_objective(const pira::Scenario& s) {
  const pira::ActionSpace space(s.topology, s.catalog);
  std::vector<std::pair<int, pira::Request>> order;
  for (int t = 0; t < s.workload.horizon(); ++t)
    for (const auto& r : s.workload.slots[t]) order.push_back({t, r});
  pira::Trace trace;
  for (int t = 0; t < s.workload.horizon(); ++t) trace.slots.push_back({t + 1, {}, {}});
  double best = -1e300;
  std::function<void(std::size_t)> dfs = [&](std::size_t j) {
    if (j == order.size()) {
      for (auto& sr : trace.slots) sr.activation = pira::activation_of(s.topology.node_count(), sr.accepted);
      best = std::max(best, pira::objective_value(s.topology, trace, s.alpha));
      return;
    }
    auto& accepted = trace.slots[order[j].first].accepted;
    dfs(j + 1);
    for (int a = 0; a < space.size(); ++a) {
      accepted.push_back({order[j].second, space.action(a)});
      if (pira::audit_slot(s.topology, s.catalog, accepted, pira::AuditScope::Full, s.latency).feasible()) dfs(j + 1);
      accepted.pop_back();
    }
  };
  dfs(0);
  return best;
}

/// Uniformly drawn feasible trace: each request is tried once with a random
/// action and kept when the slot audit still passes.
inline pira::Trace random_feasible_trace(const pira::Scenario& s, pira::Rng& rng, double accept_bias = 0.5) {
  const pira::ActionSpace space(s.topology, s.catalog);
  pira::Trace trace;
  for (int t = 0; t < s.workload.horizon(); ++t) {
    pira::SlotRecord sr{t + 1, {}, {}};
    for (const auto& r : s.workload.slots[t]) {
      if (rng.uniform01() >= accept_bias) continue;
      for (int attempt = 0; attempt < 8; ++attempt) {
        sr.accepted.push_back({r, random_action(space, rng)});
        if (pira::audit_slot(s.topology, s.catalog, sr.accepted, pira::AuditScope::Full, s.latency).feasible()) break;
        sr.accepted.pop_back();
      }
    }
    sr.activation = pira::activation_of(s.topology.node_count(), sr.accepted);
    trace.slots.push_back(std::move(sr));
  }
  return trace;
}

inline double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace testing
