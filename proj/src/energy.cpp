#include "pira/energy.hpp"

namespace pira {

int Trace::supported() const {
  int n = 0;
  for (const auto& s : slots) n += static_cast<int>(s.accepted.size());
  return n;
}

double Trace::profit() const {
  double p = 0.0;
  for (const auto& s : slots)
    for (const auto& a : s.accepted) p += a.request.profit;
  return p;
}

std::vector<std::uint8_t> activation_of(int node_count, const std::vector<Assignment>& accepted) {
  std::vector<std::uint8_t> g(node_count, 0);
  for (const auto& a : accepted) g[a.action.node] = 1;
  return g;
}

SlotRecord record_slot(const AllocationState& state) {
  return {state.slot(), state.assignments(), state.activation()};
}

double EnergyLedger::total() const {
  double sum = 0.0;
  for (double e : device_energy) sum += e;
  for (const auto& n : node_energy) sum += n.service + n.transition;
  return sum;
}

int count_transitions(const std::vector<std::uint8_t>& activity) {
  int flips = 0;
  std::uint8_t prev = 0;
  for (std::uint8_t a : activity) {
    const std::uint8_t cur = a ? 1 : 0;
    flips += prev ^ cur;
    prev = cur;
  }
  return flips;
}

std::vector<double> device_energy(const Topology& topology, const Trace& trace) {
  std::vector<double> carried(topology.device_count(), 0.0);
  for (const auto& s : trace.slots)
    for (const auto& a : s.accepted)
      for (const auto& [n, count] : topology.paths[a.action.path].device_visits)
        carried[n] += a.request.min_bandwidth * count;
  for (int n = 0; n < topology.device_count(); ++n) carried[n] *= topology.devices[n].energy_per_unit;
  return carried;
}

std::vector<NodeEnergy> node_energy(const Topology& topology, const Trace& trace) {
  const int V = topology.node_count();
  std::vector<NodeEnergy> out(V);
  std::vector<double> served(V, 0.0);
  std::vector<std::vector<std::uint8_t>> activity(V);
  for (const auto& s : trace.slots) {
    for (const auto& a : s.accepted) served[a.action.node] += a.request.min_capacity;
    for (int v = 0; v < V; ++v) activity[v].push_back(s.activation.at(v));
  }
  for (int v = 0; v < V; ++v) {
    const auto& node = topology.nodes[v];
    out[v].service = node.energy_per_unit * served[v];
    out[v].transitions = count_transitions(activity[v]);
    out[v].transition = node.energy_per_transition * out[v].transitions;
  }
  return out;
}

EnergyLedger energy_ledger(const Topology& topology, const Trace& trace) {
  return {device_energy(topology, trace), node_energy(topology, trace)};
}

double marginal_energy(const Topology& topology, const Request& request, const Action& action) {
  double e = 0.0;
  for (const auto& [n, count] : topology.paths[action.path].device_visits)
    e += topology.devices[n].energy_per_unit * request.min_bandwidth * count;
  return e + topology.nodes[action.node].energy_per_unit * request.min_capacity;
}

double objective_value(const Topology& topology, const Trace& trace, double alpha) {
  return trace.profit() - alpha * energy_ledger(topology, trace).total();
}

RunMetrics evaluate_trace(const Topology& topology, const Trace& trace, double alpha, int requests) {
  RunMetrics m;
  m.total_profit = trace.profit();
  m.total_energy = energy_ledger(topology, trace).total();
  m.objective = m.total_profit - alpha * m.total_energy;
  m.supported = trace.supported();
  m.requests = requests;
  m.mean_energy_per_supported = m.supported > 0 ? m.total_energy / m.supported : 0.0;
  return m;
}

}  // namespace pira
