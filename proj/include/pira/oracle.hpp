#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pira/energy.hpp"
#include "pira/latency.hpp"
#include "pira/workload.hpp"

namespace pira {

/// Instance sizes the exhaustive search accepts.
struct OracleBounds {
  int max_requests_per_slot = 6;
  int max_nodes = 4;
  long max_actions = 4096;
};

/// Best joint assignment of one slot whose node activation equals `mask`.
struct SlotSolution {
  std::uint32_t mask = 0;
  std::vector<std::optional<Action>> actions;   // aligned with the slot's requests
  double profit = 0.0;
  double energy = 0.0;   // transmission + service, no transition term
  double value = 0.0;    // profit - alpha * energy
};

/// For every reachable activation vector, the exact best slot value over
/// all feasible joint assignments (C1-C18). Ordered by mask.
/// Throws SizeLimitExceeded above `bounds`.
std::vector<SlotSolution> solve_slot(const Topology& topology, const ServiceCatalog& catalog,
                                     const std::vector<Request>& requests, double alpha,
                                     const LatencyModel& model = {}, const OracleBounds& bounds = {});

struct HorizonSolution {
  Trace trace;
  double objective = 0.0;
  std::vector<std::uint32_t> masks;   // chosen activation per slot
};

/// Exact optimum over the horizon: slot optima per activation vector joined
/// by a dynamic program that charges transition energy between consecutive
/// vectors, starting from the all-idle vector.
HorizonSolution solve_horizon(const Topology& topology, const ServiceCatalog& catalog,
                              const Workload& workload, double alpha, const LatencyModel& model = {},
                              const OracleBounds& bounds = {});

/// Throws SizeLimitExceeded unless the scenario fits `bounds`.
void check_oracle_bounds(const Topology& topology, const ServiceCatalog& catalog,
                         const Workload& workload, const OracleBounds& bounds = {});

}  // namespace pira
