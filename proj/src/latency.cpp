#include "pira/latency.hpp"

#include "pira/common.hpp"

namespace pira {

double queue_delay(double service_rate, double arrival_rate, double scale) {
  if (!(arrival_rate < service_rate))
    throw UnstableQueue("queue load " + std::to_string(arrival_rate) + " reaches service rate " +
                        std::to_string(service_rate));
  return scale / (service_rate - arrival_rate);
}

namespace {

double compute_load(const AllocationState& state, int v, int k, const LatencyModel& model) {
  if (!model.c15_aggregate_load) return state.node_load(v, k);
  double sum = 0.0;
  for (int kk = 0; kk < state.topology().priority_levels; ++kk) sum += state.node_load(v, kk);
  return sum;
}

}  // namespace

double device_latency(const AllocationState& state, const Request& request, int device, int k,
                      const LatencyModel& model) {
  const auto a = state.assignment_of(request.id);
  if (!a || a->priority != k) return 0.0;
  const auto& path = state.topology().paths[a->path];
  if (!path.visits_device(device)) return 0.0;
  return queue_delay(state.topology().devices[device].priority_bandwidth[k],
                     state.device_load(device, k), model.scale);
}

double node_latency(const AllocationState& state, const Request& request, int node, int k,
                    const LatencyModel& model) {
  const auto a = state.assignment_of(request.id);
  if (!a || a->priority != k || a->node != node) return 0.0;
  return queue_delay(state.topology().nodes[node].priority_capacity[k],
                     compute_load(state, node, k, model), model.scale);
}

double link_latency(const AllocationState& state, const Request& request, int link, int k,
                    const LatencyModel& model) {
  const auto a = state.assignment_of(request.id);
  if (!a || a->priority != k) return 0.0;
  if (state.topology().paths[a->path].link_multiplicity(link) == 0) return 0.0;
  return model.scale * request.packet_size / state.topology().links[link].priority_bandwidth[k];
}

LatencyBreakdown e2e_latency(const AllocationState& state, const Request& request,
                             const LatencyModel& model) {
  LatencyBreakdown b;
  const auto a = state.assignment_of(request.id);
  if (!a) return b;
  const int k = a->priority;
  b.priority = k;
  const auto& path = state.topology().paths[a->path];
  for (int n : path.devices) {
    b.device_terms.push_back({n, device_latency(state, request, n, k, model)});
    b.total += b.device_terms.back().ms;
  }
  for (int l : path.links) {
    b.link_terms.push_back({l, link_latency(state, request, l, k, model)});
    b.total += b.link_terms.back().ms;
  }
  b.node_term = {a->node, node_latency(state, request, a->node, k, model)};
  b.total += b.node_term.ms;
  b.meets_deadline = b.total <= request.max_latency;
  return b;
}

bool deadlines_met(const AllocationState& state, const LatencyModel& model) {
  try {
    for (const auto& as : state.assignments())
      if (!e2e_latency(state, as.request, model).meets_deadline) return false;
  } catch (const UnstableQueue&) {
    // only reachable with c15_aggregate_load, where C11 does not bound the load
    return false;
  }
  return true;
}

Verdict check_admission(const AllocationState& state, const Request& request, const Action& action,
                        const LatencyModel& model) {
  Verdict v = state.check(request, action);
  if (!v.feasible()) return v;
  AllocationState next = state;
  next.apply(request, action);
  if (!deadlines_met(next, model)) v.violated.push_back(Constraint::C18);
  return v;
}

std::optional<double> prospective_node_latency(const AllocationState& state, const Request& request,
                                               int v, int k, const LatencyModel& model) {
  const double mu = state.topology().nodes[v].priority_capacity[k];
  const double lambda = compute_load(state, v, k, model) + request.min_capacity;
  if (!(lambda < mu)) return std::nullopt;
  return model.scale / (mu - lambda);
}

std::optional<double> prospective_network_latency(const AllocationState& state,
                                                  const Request& request, int p, int k,
                                                  const LatencyModel& model) {
  const auto& topo = state.topology();
  const auto& path = topo.paths[p];
  double total = 0.0;
  for (const auto& [n, count] : path.device_visits) {
    const double mu = topo.devices[n].priority_bandwidth[k];
    const double lambda = state.device_load(n, k) + request.min_bandwidth * count;
    if (!(lambda < mu)) return std::nullopt;
    total += count * model.scale / (mu - lambda);
  }
  for (const auto& [l, count] : path.link_visits)
    total += count * model.scale * request.packet_size / topo.links[l].priority_bandwidth[k];
  return total;
}

void write_latency_audit(std::ostream& out, const AllocationState& state, const LatencyModel& model) {
  out << "t,r,resource_type,resource_id,k,term_ms\n";
  for (const auto& as : state.assignments()) {
    const auto b = e2e_latency(state, as.request, model);
    const auto row = [&](const char* type, int id, double ms) {
      out << state.slot() << ',' << as.request.id << ',' << type << ',' << id << ',' << b.priority
          << ',' << ms << '\n';
    };
    for (const auto& t : b.device_terms) row("device", t.resource, t.ms);
    row("node", b.node_term.resource, b.node_term.ms);
    for (const auto& t : b.link_terms) row("link", t.resource, t.ms);
  }
}

}  // namespace pira
