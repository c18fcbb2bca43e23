#pragma once

#include <cstdint>
#include <vector>

#include "pira/allocation.hpp"

namespace pira {

/// Accepted assignments and resulting node activation of one slot.
struct SlotRecord {
  int slot = 0;
  std::vector<Assignment> accepted;
  std::vector<std::uint8_t> activation;

  bool operator==(const SlotRecord&) const = default;
};

/// A complete allocation over the horizon, slots in order.
struct Trace {
  std::vector<SlotRecord> slots;

  bool operator==(const Trace&) const = default;
  int supported() const;
  double profit() const;
};

SlotRecord record_slot(const AllocationState& state);
/// Activation vector implied by a set of assignments.
std::vector<std::uint8_t> activation_of(int node_count, const std::vector<Assignment>& accepted);

struct NodeEnergy {
  double service = 0.0;
  double transition = 0.0;
  int transitions = 0;
};

struct EnergyLedger {
  std::vector<double> device_energy;
  std::vector<NodeEnergy> node_energy;

  double total() const;
};

/// Number of state flips of a node across the horizon, with the node idle
/// before the first slot.
int count_transitions(const std::vector<std::uint8_t>& activity);

/// Per-device transmission energy; a walk crossing a device twice carries
/// the request's bandwidth twice.
std::vector<double> device_energy(const Topology& topology, const Trace& trace);
std::vector<NodeEnergy> node_energy(const Topology& topology, const Trace& trace);
EnergyLedger energy_ledger(const Topology& topology, const Trace& trace);

/// Transmission plus service energy of serving `request` with `action`;
/// transition energy is not included.
double marginal_energy(const Topology& topology, const Request& request, const Action& action);

/// Accepted profit minus alpha times all energy.
double objective_value(const Topology& topology, const Trace& trace, double alpha);

struct RunMetrics {
  double total_profit = 0.0;
  double total_energy = 0.0;
  double objective = 0.0;
  int supported = 0;
  int requests = 0;
  double mean_energy_per_supported = 0.0;
};

RunMetrics evaluate_trace(const Topology& topology, const Trace& trace, double alpha, int requests);

}  // namespace pira
