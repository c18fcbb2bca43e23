#pragma once

#include <vector>

#include "pira/allocation.hpp"
#include "pira/latency.hpp"

namespace pira {

enum class AuditScope { Capacity, Full };

/// Re-evaluates the constraints of one slot from a bare list of
/// assignments, summing every constraint's left-hand side directly instead
/// of consulting a ledger. An instance is hosted where its first assignment
/// put it. With AuditScope::Full, C18 is evaluated when C1-C13 hold.
Verdict audit_slot(const Topology& topology, const ServiceCatalog& catalog,
                   const std::vector<Assignment>& assignments, AuditScope scope = AuditScope::Full,
                   const LatencyModel& model = {});

/// End-to-end latency of assignments[j], summed over the walk's crossings
/// with arrival rates recomputed from the assignment list.
double audit_e2e_latency(const Topology& topology, const std::vector<Assignment>& assignments,
                         std::size_t j, const LatencyModel& model = {});

}  // namespace pira
