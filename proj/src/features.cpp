#include "pira/features.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace pira {

namespace {

double clamp1(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

FeatureScales feature_scales(const Topology& t) {
  FeatureScales s{0.0, 0.0, 0.0, 0.0};
  for (const auto& d : t.devices) {
    s.capacity = std::max(s.capacity, *std::max_element(d.priority_bandwidth.begin(), d.priority_bandwidth.end()));
    s.unit_energy = std::max(s.unit_energy, d.energy_per_unit);
  }
  for (const auto& l : t.links)
    s.capacity = std::max(s.capacity, *std::max_element(l.priority_bandwidth.begin(), l.priority_bandwidth.end()));
  for (const auto& v : t.nodes) {
    s.capacity = std::max(s.capacity, *std::max_element(v.priority_capacity.begin(), v.priority_capacity.end()));
    s.unit_energy = std::max(s.unit_energy, v.energy_per_unit);
    s.transition = std::max(s.transition, v.energy_per_transition);
  }
  for (const auto& p : t.paths) {
    double e = 0.0;
    for (int n : p.devices) e += t.devices[n].energy_per_unit;
    s.path_energy = std::max(s.path_energy, e);
  }
  for (double* x : {&s.capacity, &s.unit_energy, &s.transition, &s.path_energy})
    if (!(*x > 0.0)) *x = 1.0;
  return s;
}

int FeatureShape::flat_width() const {
  return nodes * node_width() + paths * path_width() + instances * instance_width() + paths +
         paths * nodes + instances * nodes;
}

FeatureShape feature_shape(const Topology& topology, const ServiceCatalog& catalog) {
  return {catalog.instance_count(), topology.node_count(), topology.path_count(), topology.priority_levels};
}

FeatureShape StateFeatures::shape() const {
  const int V = static_cast<int>(nodes.rows());
  const int K = (static_cast<int>(nodes.cols()) - 2) / 2;
  return {static_cast<int>(instances.rows()), V, static_cast<int>(paths.rows()), K};
}

Eigen::VectorXd StateFeatures::flatten() const {
  Eigen::VectorXd x(shape().flat_width());
  Eigen::Index at = 0;
  auto put = [&](const auto& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) x[at++] = m(r, c);
  };
  put(nodes);
  put(paths);
  put(instances);
  put(path_serves);
  put(path_reach);
  put(instance_host);
  return x;
}

Eigen::MatrixXd node_adjacency(const Topology& t, int hops) {
  const int N = t.device_count();
  const int V = t.node_count();
  std::vector<std::vector<int>> adj(N);
  for (const auto& l : t.links) {
    adj[l.from].push_back(l.to);
    adj[l.to].push_back(l.from);
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(V, V);
  for (int v = 0; v < V; ++v) {
    std::vector<int> dist(N, std::numeric_limits<int>::max());
    std::deque<int> q{t.nodes[v].device};
    dist[t.nodes[v].device] = 0;
    while (!q.empty()) {
      const int n = q.front();
      q.pop_front();
      for (int m : adj[n])
        if (dist[m] == std::numeric_limits<int>::max()) {
          dist[m] = dist[n] + 1;
          q.push_back(m);
        }
    }
    for (int u = 0; u < V; ++u)
      if (dist[t.nodes[u].device] <= hops) a(v, u) = 1.0;
    a.row(v) /= a.row(v).sum();
  }
  return a;
}

StateEncoder::StateEncoder(const Topology& topology, const ServiceCatalog& catalog, LatencyModel model,
                           int neighbor_hops)
    : topology_(&topology),
      catalog_(&catalog),
      model_(model),
      scales_(feature_scales(topology)),
      shape_(feature_shape(topology, catalog)),
      adjacency_(node_adjacency(topology, neighbor_hops)) {
  const int V = topology.node_count(), P = topology.path_count();
  path_reach_ = Eigen::MatrixXd::Zero(P, V);
  path_unit_energy_ = Eigen::VectorXd::Zero(P);
  for (int p = 0; p < P; ++p) {
    const auto& path = topology.paths[p];
    for (int v = 0; v < V; ++v) path_reach_(p, v) = path.visits_device(topology.nodes[v].device) ? 1.0 : 0.0;
    for (int n : path.devices) path_unit_energy_[p] += topology.devices[n].energy_per_unit;
  }
}

StateFeatures StateEncoder::encode(const AllocationState& state, const Request& r) const {
  const auto& t = *topology_;
  const int K = t.priority_levels, V = t.node_count(), P = t.path_count();
  const int I = catalog_->instance_count();
  StateFeatures f;

  f.nodes.resize(V, 2 * K + 2);
  for (int v = 0; v < V; ++v) {
    for (int k = 0; k < K; ++k) {
      f.nodes(v, k) = clamp1((state.node_residual(v, k) - r.min_capacity) / scales_.capacity);
      const auto lat = prospective_node_latency(state, r, v, k, model_);
      f.nodes(v, K + k) = lat ? clamp1((*lat - r.max_latency) / r.max_latency) : 1.0;
    }
    f.nodes(v, 2 * K) = t.nodes[v].energy_per_unit / scales_.unit_energy;
    f.nodes(v, 2 * K + 1) =
        t.nodes[v].energy_per_transition * (state.node_active(v) ? 0.0 : 1.0) / scales_.transition;
  }

  f.paths.resize(P, 2 * K + 1);
  f.path_serves.resize(P);
  for (int p = 0; p < P; ++p) {
    const auto& path = t.paths[p];
    const bool serves = path.endpoint_device == r.poa;
    f.path_serves[p] = serves ? 1.0 : 0.0;
    for (int k = 0; k < K; ++k) {
      if (!serves) {
        f.paths(p, k) = -1.0;
        f.paths(p, K + k) = -1.0;
        continue;
      }
      double bottleneck = std::numeric_limits<double>::infinity();
      for (const auto& vis : path.device_visits) bottleneck = std::min(bottleneck, state.device_residual(vis.index, k));
      for (const auto& vis : path.link_visits) bottleneck = std::min(bottleneck, state.link_residual(vis.index, k));
      f.paths(p, k) = clamp1((bottleneck - r.min_bandwidth) / scales_.capacity);
      const auto lat = prospective_network_latency(state, r, p, k, model_);
      f.paths(p, K + k) = lat ? clamp1((*lat - r.max_latency) / r.max_latency) : 1.0;
    }
    f.paths(p, 2 * K) = path_unit_energy_[p] / scales_.path_energy;
  }

  f.instances.resize(I, 3);
  f.instance_host = Eigen::MatrixXd::Zero(I, V);
  for (int i = 0; i < I; ++i) {
    const auto& inst = catalog_->instances[i];
    f.instances(i, 0) = inst.service == r.service ? 1.0 : 0.0;
    f.instances(i, 1) = clamp1((inst.capacity - state.instance_load(i) - r.min_capacity) / inst.capacity);
    f.instances(i, 2) = state.instance_active(i) ? 1.0 : 0.0;
    if (const auto h = state.instance_host(i)) f.instance_host(i, *h) = 1.0;
  }
  f.path_reach = path_reach_;
  f.adjacency = adjacency_;
  return f;
}

}  // namespace pira
