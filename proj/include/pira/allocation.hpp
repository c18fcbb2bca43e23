#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pira/topology.hpp"
#include "pira/workload.hpp"

namespace pira {

/// The decision unit (instance, compute node, path, priority level).
struct Action {
  int instance = 0;
  int node = 0;
  int path = 0;
  int priority = 0;

  auto operator<=>(const Action&) const = default;
};

/// Dense indexing of I x V x P x K, priority fastest.
class ActionSpace {
 public:
  ActionSpace() = default;
  ActionSpace(int instances, int nodes, int paths, int priorities);
  ActionSpace(const Topology& topology, const ServiceCatalog& catalog);

  int size() const { return instances_ * nodes_ * paths_ * priorities_; }
  int instances() const { return instances_; }
  int nodes() const { return nodes_; }
  int paths() const { return paths_; }
  int priorities() const { return priorities_; }

  int index(const Action& a) const {
    return ((a.instance * nodes_ + a.node) * paths_ + a.path) * priorities_ + a.priority;
  }
  Action action(int index) const;
  bool contains(const Action& a) const;

 private:
  int instances_ = 0;
  int nodes_ = 0;
  int paths_ = 0;
  int priorities_ = 0;
};

/// Constraint identifiers of the joint formulation.
enum class Constraint : std::uint8_t {
  C1 = 1, C2, C3, C4, C5, C6, C7, C8, C9, C10, C11, C12, C13, C14, C15, C16, C17, C18
};

std::string to_string(Constraint c);
/// "C5;C11"; empty string for no violations.
std::string join_constraints(const std::vector<Constraint>& cs);

struct Verdict {
  std::vector<Constraint> violated;   // ascending, no duplicates

  bool feasible() const { return violated.empty(); }
  bool operator==(const Verdict&) const = default;
};

struct Assignment {
  Request request;
  Action action;

  bool operator==(const Assignment&) const = default;
};

/// Per-slot ledger: which request went where, which instances and nodes are
/// active, and the load on every per-priority queue. Activation flags are
/// derived from the assignments, never set directly.
class AllocationState {
 public:
  AllocationState(const Topology& topology, const ServiceCatalog& catalog, int slot = 1);

  int slot() const { return slot_; }
  const Topology& topology() const { return *topology_; }
  const ServiceCatalog& catalog() const { return *catalog_; }
  const std::vector<Assignment>& assignments() const { return assignments_; }
  std::optional<Action> assignment_of(int request_id) const;

  bool instance_active(int i) const { return instance_requests_[i] > 0; }
  std::optional<int> instance_host(int i) const;
  bool node_active(int v) const { return node_instances_[v] > 0; }
  std::vector<std::uint8_t> activation() const;
  /// Activation vectors of completed slots, starting with the all-idle slot 0.
  const std::vector<std::vector<std::uint8_t>>& history() const { return history_; }

  double instance_load(int i) const { return instance_load_[i]; }
  double node_hosted_capacity(int v) const { return node_hosted_capacity_[v]; }
  double node_load(int v, int k) const { return node_load_[v * levels_ + k]; }
  double device_load(int n, int k) const { return device_load_[n * levels_ + k]; }
  double link_load(int l, int k) const { return link_load_[l * levels_ + k]; }
  double device_total_load(int n) const { return device_total_[n]; }
  double link_total_load(int l) const { return link_total_[l]; }

  double node_residual(int v, int k) const;
  double device_residual(int n, int k) const;
  double link_residual(int l, int k) const;

  /// Constraints C1-C13 that applying `action` for `request` would violate.
  /// Throws Error when the request belongs to another slot and
  /// std::out_of_range on indices outside the action space.
  Verdict check(const Request& request, const Action& action) const;
  /// Records the assignment; throws InfeasibleAction without mutating when
  /// check() reports any violation.
  void apply(const Request& request, const Action& action);
  /// Fresh ledger for the next slot; only the activation history carries over.
  AllocationState advance() const;

 private:
  const Topology* topology_;
  const ServiceCatalog* catalog_;
  int slot_;
  int levels_;
  std::vector<Assignment> assignments_;
  std::vector<int> instance_host_;          // -1 when idle
  std::vector<int> instance_requests_;
  std::vector<double> instance_load_;
  std::vector<int> node_instances_;
  std::vector<double> node_hosted_capacity_;
  std::vector<double> node_load_;
  std::vector<double> device_load_;
  std::vector<double> link_load_;
  std::vector<double> device_total_;
  std::vector<double> link_total_;
  std::vector<std::vector<std::uint8_t>> history_;
};

inline Verdict check_feasibility(const AllocationState& state, const Request& request,
                                 const Action& action) {
  return state.check(request, action);
}
inline void apply_action(AllocationState& state, const Request& request, const Action& action) {
  state.apply(request, action);
}
inline AllocationState advance_slot(const AllocationState& state) { return state.advance(); }

/// One row of the allocation history: a decision taken for one request.
struct DecisionRecord {
  int slot = 0;
  int request = 0;
  std::optional<Action> action;   // nullopt: nothing was attempted
  bool accepted = false;
  std::vector<Constraint> violated;

  bool operator==(const DecisionRecord&) const = default;
};

/// CSV with header t,r,i,v,p,k,accepted,violated_constraints.
void write_allocation_trace(std::ostream& out, const std::vector<DecisionRecord>& rows);
std::vector<DecisionRecord> read_allocation_trace(std::istream& in);

}  // namespace pira
