#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "json.hpp"

namespace pira {

/// A network device n with its per-priority bandwidth partitions.
struct NetworkDevice {
  int id = 0;
  double total_bandwidth = 0.0;             // mbps
  std::vector<double> priority_bandwidth;   // one queue per priority level
  double energy_per_unit = 0.0;             // energy per bandwidth unit carried
  bool is_edge = false;                     // may act as a Point of Arrival

  bool operator==(const NetworkDevice&) const = default;
};

struct Link {
  int id = 0;
  int from = 0;
  int to = 0;
  double total_bandwidth = 0.0;
  std::vector<double> priority_bandwidth;

  bool operator==(const Link&) const = default;
  int other(int device) const { return device == from ? to : from; }
};

struct ComputeNode {
  int id = 0;
  int device = 0;   // immediate network device n_v
  double total_capacity = 0.0;
  std::vector<double> priority_capacity;
  double energy_per_unit = 0.0;
  double energy_per_transition = 0.0;   // boot-up or shutdown

  bool operator==(const ComputeNode&) const = default;
};

/// How many times a walk passes through one resource.
struct Visit {
  int index = 0;
  int count = 0;

  bool operator==(const Visit&) const = default;
};

/// A closed walk that leaves an edge device, reaches a node's device, and
/// returns to the same edge device. Traffic crosses every occurrence.
struct Path {
  int id = 0;
  int endpoint_device = 0;
  int node_device = 0;
  std::vector<int> devices;   // first == last == endpoint_device
  std::vector<int> links;     // links[j] joins devices[j] and devices[j + 1]

  // Derived from the walk; sorted by resource index.
  std::vector<Visit> device_visits;
  std::vector<Visit> link_visits;

  bool operator==(const Path&) const = default;

  int hops() const { return static_cast<int>(links.size()); }
  bool visits_device(int device) const;
  int device_multiplicity(int device) const;
  int link_multiplicity(int link) const;
};

/// The integrated compute/network graph. Immutable once built.
struct Topology {
  int priority_levels = 1;
  std::uint64_t seed = 0;
  std::vector<NetworkDevice> devices;
  std::vector<ComputeNode> nodes;
  std::vector<Link> links;
  std::vector<Path> paths;

  bool operator==(const Topology&) const = default;

  int device_count() const { return static_cast<int>(devices.size()); }
  int node_count() const { return static_cast<int>(nodes.size()); }
  int link_count() const { return static_cast<int>(links.size()); }
  int path_count() const { return static_cast<int>(paths.size()); }

  std::vector<int> edge_devices() const;
  /// Indices of paths that start at `poa` and visit the device of `node`.
  std::vector<int> paths_serving(int poa, int node) const;
  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

/// Splits `total` into `levels` shares proportional to `weights`.
/// Weights must be positive and non-increasing so higher priorities
/// (lower index) never get less than lower ones.
std::vector<double> partition_priorities(double total, int levels,
                                         const std::vector<double>& weights);

/// Default weights 2^(K-k-1): (8, 4, 2, 1) for four levels.
std::vector<double> default_priority_weights(int levels);

/// Loop-free out-and-back walks for every (edge device, compute node) pair,
/// at most `per_pair_limit` per pair, shortest first, ties broken by the
/// device sequence. Pairs where the node sits on the edge device itself
/// yield no walk.
std::vector<Path> enumerate_paths(const Topology& topology, int per_pair_limit);

/// Fills device_visits / link_visits / node_device from the walk.
void finalize_path(Path& path);

/// Builds and validates a topology from its JSON description. Capacity and
/// energy fields that are absent are drawn from the `draws` ranges using
/// `seed`; paths are enumerated when the `paths` array is absent.
Topology build_topology(const nlohmann::json& spec);

/// Fully resolved description; build_topology(topology_to_json(t)) == t.
nlohmann::json topology_to_json(const Topology& topology);

}  // namespace pira
