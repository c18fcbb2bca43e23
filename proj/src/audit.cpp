#include "pira/audit.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace pira {

namespace {

int occurrences(const std::vector<int>& walk, int x) {
  return static_cast<int>(std::count(walk.begin(), walk.end(), x));
}

// Arrival rate of the priority-k queue on device n: sum of B_r times the
// number of crossings, over requests at priority k whose walks cross n.
double device_arrivals(const Topology& t, const std::vector<Assignment>& as, int n, int k) {
  double sum = 0.0;
  for (const auto& a : as)
    if (a.action.priority == k) {
      const int c = occurrences(t.paths[a.action.path].devices, n);
      if (c > 0) sum += a.request.min_bandwidth * c;
    }
  return sum;
}

double link_arrivals(const Topology& t, const std::vector<Assignment>& as, int l, int k) {
  double sum = 0.0;
  for (const auto& a : as)
    if (a.action.priority == k) {
      const int c = occurrences(t.paths[a.action.path].links, l);
      if (c > 0) sum += a.request.min_bandwidth * c;
    }
  return sum;
}

double node_arrivals(const std::vector<Assignment>& as, int v, int k, bool all_levels) {
  double sum = 0.0;
  for (const auto& a : as)
    if (a.action.node == v && (all_levels || a.action.priority == k)) sum += a.request.min_capacity;
  return sum;
}

}  // namespace

double audit_e2e_latency(const Topology& t, const std::vector<Assignment>& as, std::size_t j,
                         const LatencyModel& model) {
  const auto& a = as[j];
  const int k = a.action.priority;
  const auto& path = t.paths[a.action.path];
  const double inf = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (int n : path.devices) {
    const double mu = t.devices[n].priority_bandwidth[k];
    const double lambda = device_arrivals(t, as, n, k);
    if (lambda >= mu) return inf;
    total += model.scale / (mu - lambda);
  }
  for (int l : path.links) total += model.scale * a.request.packet_size / t.links[l].priority_bandwidth[k];
  const double mu = t.nodes[a.action.node].priority_capacity[k];
  const double lambda = node_arrivals(as, a.action.node, k, model.c15_aggregate_load);
  if (lambda >= mu) return inf;
  total += model.scale / (mu - lambda);
  return total;
}

Verdict audit_slot(const Topology& t, const ServiceCatalog& catalog,
                   const std::vector<Assignment>& as, AuditScope scope, const LatencyModel& model) {
  std::set<Constraint> bad;
  const int K = t.priority_levels;

  // C1: one instance of the request's own service.
  for (std::size_t j = 0; j < as.size(); ++j) {
    const auto& a = as[j];
    if (catalog.instances[a.action.instance].service != a.request.service) bad.insert(Constraint::C1);
    for (std::size_t m = 0; m < j; ++m)
      if (as[m].request.id == a.request.id) bad.insert(Constraint::C1);
  }
  // C3 / C5 / C6.
  std::vector<int> host(catalog.instance_count(), -1);
  for (const auto& a : as) {
    int& h = host[a.action.instance];
    if (h < 0) h = a.action.node;
    else if (h != a.action.node) bad.insert(Constraint::C3);
  }
  for (int i = 0; i < catalog.instance_count(); ++i) {
    double load = 0.0;
    for (const auto& a : as)
      if (a.action.instance == i) load += a.request.min_capacity;
    if (load > catalog.instances[i].capacity) bad.insert(Constraint::C5);
  }
  for (int v = 0; v < t.node_count(); ++v) {
    // instances in order of first placement, matching the ledger's summation order
    double hosted = 0.0;
    std::vector<char> seen(catalog.instance_count(), 0);
    for (const auto& a : as) {
      const int i = a.action.instance;
      if (seen[i]) continue;
      seen[i] = 1;
      if (host[i] == v) hosted += catalog.instances[i].capacity;
    }
    if (hosted > t.nodes[v].total_capacity) bad.insert(Constraint::C6);
  }
  // C7: walk starts and ends at the PoA and crosses the host's device.
  for (const auto& a : as) {
    const auto& p = t.paths[a.action.path];
    const int nv = t.nodes[a.action.node].device;
    if (p.devices.front() != a.request.poa || p.devices.back() != a.request.poa ||
        occurrences(p.devices, nv) == 0)
      bad.insert(Constraint::C7);
  }
  // C8 / C9 totals, C12 / C13 per priority (strict).
  for (int l = 0; l < t.link_count(); ++l) {
    double total = 0.0;
    for (const auto& a : as) {
      const int c = occurrences(t.paths[a.action.path].links, l);
      if (c > 0) total += a.request.min_bandwidth * c;
    }
    if (total > t.links[l].total_bandwidth) bad.insert(Constraint::C8);
    for (int k = 0; k < K; ++k)
      if (link_arrivals(t, as, l, k) >= t.links[l].priority_bandwidth[k]) bad.insert(Constraint::C12);
  }
  for (int n = 0; n < t.device_count(); ++n) {
    double total = 0.0;
    for (const auto& a : as) {
      const int c = occurrences(t.paths[a.action.path].devices, n);
      if (c > 0) total += a.request.min_bandwidth * c;
    }
    if (total > t.devices[n].total_bandwidth) bad.insert(Constraint::C9);
    for (int k = 0; k < K; ++k)
      if (device_arrivals(t, as, n, k) >= t.devices[n].priority_bandwidth[k]) bad.insert(Constraint::C13);
  }
  // C10: a priority accompanies every assignment.
  for (const auto& a : as)
    if (a.action.priority < 0 || a.action.priority >= K) bad.insert(Constraint::C10);
  // C11.
  for (int v = 0; v < t.node_count(); ++v)
    for (int k = 0; k < K; ++k)
      if (node_arrivals(as, v, k, false) >= t.nodes[v].priority_capacity[k]) bad.insert(Constraint::C11);

  if (scope == AuditScope::Full && bad.empty()) {
    for (std::size_t j = 0; j < as.size(); ++j)
      if (!(audit_e2e_latency(t, as, j, model) <= as[j].request.max_latency)) {
        bad.insert(Constraint::C18);
        break;
      }
  }
  return Verdict{{bad.begin(), bad.end()}};
}

}  // namespace pira
