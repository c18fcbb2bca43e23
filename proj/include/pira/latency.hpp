#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "pira/allocation.hpp"

namespace pira {

/// Unit handling for the M/M/1 terms.
struct LatencyModel {
  /// Multiplies every 1/(mu - lambda) and packet/bandwidth term to yield ms.
  double scale = 1.0;
  /// Compute-queue arrival rate summed over all priorities on the node
  /// instead of the request's own priority level.
  bool c15_aggregate_load = false;
};

/// Mean sojourn of an M/M/1 queue, scaled. Throws UnstableQueue when
/// arrival_rate >= service_rate.
double queue_delay(double service_rate, double arrival_rate, double scale = 1.0);

/// Per-visit latency of `request` at `device` on priority `k`; zero when the
/// request's walk does not cross the device at that priority.
double device_latency(const AllocationState& state, const Request& request, int device, int k,
                      const LatencyModel& model = {});
/// Latency of `request` in the priority-k compute queue of `node`.
double node_latency(const AllocationState& state, const Request& request, int node, int k,
                    const LatencyModel& model = {});
/// Transmission time of one packet of `request` over `link` (per crossing).
double link_latency(const AllocationState& state, const Request& request, int link, int k,
                    const LatencyModel& model = {});

struct LatencyTerm {
  int resource = 0;
  double ms = 0.0;
};

/// One entry per crossing of the walk; the PoA appears at both ends.
struct LatencyBreakdown {
  int priority = 0;
  std::vector<LatencyTerm> device_terms;
  LatencyTerm node_term;
  std::vector<LatencyTerm> link_terms;
  double total = 0.0;
  bool meets_deadline = false;
};

/// End-to-end age of information of an assigned request; all zero and
/// deadline unmet for requests without an assignment.
LatencyBreakdown e2e_latency(const AllocationState& state, const Request& request,
                             const LatencyModel& model = {});

/// True iff every assigned request meets its deadline.
bool deadlines_met(const AllocationState& state, const LatencyModel& model = {});

/// C1-C13 from the ledger, then C18 over every request of the resulting
/// state (the newcomer raises its neighbours' queueing delays).
Verdict check_admission(const AllocationState& state, const Request& request, const Action& action,
                        const LatencyModel& model = {});

/// Latency of `request` at node `v`, priority `k`, if it were placed there
/// now; nullopt when the queue would become unstable.
std::optional<double> prospective_node_latency(const AllocationState& state, const Request& request,
                                               int v, int k, const LatencyModel& model = {});
/// Device plus link latency of `request` along path `p` at priority `k` if
/// it were routed there now; nullopt when any queue would become unstable.
std::optional<double> prospective_network_latency(const AllocationState& state,
                                                  const Request& request, int p, int k,
                                                  const LatencyModel& model = {});

/// CSV t,r,resource_type,resource_id,k,term_ms for every assigned request.
void write_latency_audit(std::ostream& out, const AllocationState& state,
                         const LatencyModel& model = {});

}  // namespace pira
