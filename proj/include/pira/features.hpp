#pragma once

#include <Eigen/Dense>

#include "pira/latency.hpp"

namespace pira {

/// Normalisers derived once per topology.
struct FeatureScales {
  double capacity = 1.0;      // largest per-priority partition of any resource
  double unit_energy = 1.0;   // largest per-unit energy of any device or node
  double transition = 1.0;    // largest transition energy
  double path_energy = 1.0;   // largest per-unit energy summed along a walk
};

FeatureScales feature_scales(const Topology& topology);

/// Entity counts that fix the input and output shapes of a Q-function.
struct FeatureShape {
  int instances = 0;
  int nodes = 0;
  int paths = 0;
  int levels = 1;

  int node_width() const { return 2 * levels + 2; }
  int path_width() const { return 2 * levels + 1; }
  static constexpr int instance_width() { return 3; }
  int action_count() const { return instances * nodes * paths * levels; }
  int flat_width() const;
  bool operator==(const FeatureShape&) const = default;
};

FeatureShape feature_shape(const Topology& topology, const ServiceCatalog& catalog);

/// Encoding of the system as seen by one pending request.
///
/// Node rows: [capacity slack per k, node-latency excess per k, unit energy,
/// boot cost if idle]. Path rows: [bottleneck bandwidth slack per k,
/// network-latency excess per k, unit energy summed over the walk].
/// Slacks are (residual - demand) / largest partition; excesses are
/// (latency - deadline) / deadline; energies are divided by their scenario
/// maxima. Slacks and excesses are clamped to [-1, 1]. Paths that do not
/// start at the request's PoA carry -1 in every slack and excess entry;
/// queues that would turn unstable give excess +1.
struct StateFeatures {
  Eigen::MatrixXd nodes;           // V x (2K + 2)
  Eigen::MatrixXd paths;           // P x (2K + 1)
  Eigen::MatrixXd instances;       // I x 3: serves the request's service, capacity slack, active
  Eigen::MatrixXd path_reach;      // P x V: walk crosses node v's device
  Eigen::VectorXd path_serves;     // P: walk starts at the request's PoA
  Eigen::MatrixXd instance_host;   // I x V: instance currently hosted on v
  Eigen::MatrixXd adjacency;       // V x V, row-normalised, self loops included

  FeatureShape shape() const;
  /// All entries in one vector (input of the dense-only network).
  Eigen::VectorXd flatten() const;
};

/// Compute-node neighbourhood: nodes whose devices are within `hops` of each
/// other, self included, rows normalised to sum to one.
Eigen::MatrixXd node_adjacency(const Topology& topology, int hops = 1);

class StateEncoder {
 public:
  StateEncoder(const Topology& topology, const ServiceCatalog& catalog, LatencyModel model = {},
               int neighbor_hops = 1);

  StateFeatures encode(const AllocationState& state, const Request& request) const;
  const FeatureScales& scales() const { return scales_; }
  FeatureShape shape() const { return shape_; }

 private:
  const Topology* topology_;
  const ServiceCatalog* catalog_;
  LatencyModel model_;
  FeatureScales scales_;
  FeatureShape shape_;
  Eigen::MatrixXd adjacency_;
  Eigen::MatrixXd path_reach_;
  Eigen::VectorXd path_unit_energy_;
};

inline StateFeatures encode_state(const StateEncoder& encoder, const AllocationState& state,
                                  const Request& request) {
  return encoder.encode(state, request);
}

}  // namespace pira
