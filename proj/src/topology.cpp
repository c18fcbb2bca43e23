#include "pira/topology.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <string>

#include "pira/common.hpp"

namespace pira {

using nlohmann::json;

bool Path::visits_device(int device) const {
  return device_multiplicity(device) > 0;
}

int Path::device_multiplicity(int device) const {
  for (const auto& v : device_visits)
    if (v.index == device) return v.count;
  return 0;
}

int Path::link_multiplicity(int link) const {
  for (const auto& v : link_visits)
    if (v.index == link) return v.count;
  return 0;
}

std::vector<int> Topology::edge_devices() const {
  std::vector<int> out;
  for (const auto& d : devices)
    if (d.is_edge) out.push_back(d.id);
  return out;
}

std::vector<int> Topology::paths_serving(int poa, int node) const {
  std::vector<int> out;
  const int target = nodes.at(node).device;
  for (const auto& p : paths)
    if (p.endpoint_device == poa && p.visits_device(target)) out.push_back(p.id);
  return out;
}

namespace {

constexpr double kShareTolerance = 1e-9;

void check_partition(const std::vector<double>& shares, double total, int levels,
                     const std::string& what) {
  if (static_cast<int>(shares.size()) != levels)
    throw ConfigError(what + ": expected " + std::to_string(levels) + " priority shares");
  double sum = 0.0;
  for (int k = 0; k < levels; ++k) {
    if (!(shares[k] > 0.0)) throw ConfigError(what + ": priority share must be positive");
    if (k > 0 && shares[k] > shares[k - 1] * (1.0 + kShareTolerance))
      throw ConfigError(what + ": priority shares must be non-increasing in k");
    sum += shares[k];
  }
  if (sum > total * (1.0 + kShareTolerance))
    throw ConfigError(what + ": priority shares exceed total capacity");
}

std::vector<Visit> count_visits(const std::vector<int>& items) {
  std::map<int, int> counts;
  for (int x : items) ++counts[x];
  std::vector<Visit> out;
  out.reserve(counts.size());
  for (const auto& [index, count] : counts) out.push_back({index, count});
  return out;
}

}  // namespace

void finalize_path(Path& path) {
  path.device_visits = count_visits(path.devices);
  path.link_visits = count_visits(path.links);
}

void Topology::validate() const {
  if (priority_levels < 1) throw ConfigError("priority_levels must be at least 1");
  const int n_dev = device_count();
  for (int n = 0; n < n_dev; ++n) {
    const auto& d = devices[n];
    const std::string what = "device " + std::to_string(n);
    if (d.id != n) throw ConfigError(what + ": ids must equal their position");
    if (!(d.total_bandwidth > 0.0)) throw ConfigError(what + ": bandwidth must be positive");
    if (!(d.energy_per_unit > 0.0)) throw ConfigError(what + ": energy_per_unit must be positive");
    check_partition(d.priority_bandwidth, d.total_bandwidth, priority_levels, what);
  }
  for (int l = 0; l < link_count(); ++l) {
    const auto& link = links[l];
    const std::string what = "link " + std::to_string(l);
    if (link.id != l) throw ConfigError(what + ": ids must equal their position");
    if (link.from < 0 || link.from >= n_dev || link.to < 0 || link.to >= n_dev)
      throw ConfigError(what + ": unknown device");
    if (link.from == link.to) throw ConfigError(what + ": self loop");
    if (!(link.total_bandwidth > 0.0)) throw ConfigError(what + ": bandwidth must be positive");
    check_partition(link.priority_bandwidth, link.total_bandwidth, priority_levels, what);
  }
  for (int v = 0; v < node_count(); ++v) {
    const auto& node = nodes[v];
    const std::string what = "node " + std::to_string(v);
    if (node.id != v) throw ConfigError(what + ": ids must equal their position");
    if (node.device < 0 || node.device >= n_dev) throw ConfigError(what + ": unknown device");
    if (!(node.total_capacity > 0.0)) throw ConfigError(what + ": capacity must be positive");
    if (!(node.energy_per_unit > 0.0)) throw ConfigError(what + ": energy_per_unit must be positive");
    if (node.energy_per_transition < 0.0)
      throw ConfigError(what + ": energy_per_transition must be non-negative");
    check_partition(node.priority_capacity, node.total_capacity, priority_levels, what);
  }
  for (int p = 0; p < path_count(); ++p) {
    const auto& path = paths[p];
    const std::string what = "path " + std::to_string(p);
    if (path.id != p) throw ConfigError(what + ": ids must equal their position");
    if (path.links.empty()) throw ConfigError(what + ": empty link set");
    if (path.devices.size() != path.links.size() + 1)
      throw ConfigError(what + ": walk needs one more device than links");
    for (int d : path.devices)
      if (d < 0 || d >= n_dev) throw ConfigError(what + ": unknown device");
    if (path.devices.front() != path.endpoint_device || path.devices.back() != path.endpoint_device)
      throw ConfigError(what + ": walk must start and end at its endpoint device");
    for (std::size_t j = 0; j < path.links.size(); ++j) {
      const int l = path.links[j];
      if (l < 0 || l >= link_count()) throw ConfigError(what + ": unknown link");
      const auto& link = links[l];
      const int a = path.devices[j], b = path.devices[j + 1];
      if (!((link.from == a && link.to == b) || (link.from == b && link.to == a)))
        throw ConfigError(what + ": walk is not edge-connected");
    }
    if (std::find(path.devices.begin(), path.devices.end(), path.node_device) == path.devices.end())
      throw ConfigError(what + ": node device not on the walk");
    Path copy = path;
    finalize_path(copy);
    if (copy.device_visits != path.device_visits || copy.link_visits != path.link_visits)
      throw ConfigError(what + ": stale visit counts");
  }
}

std::vector<double> default_priority_weights(int levels) {
  std::vector<double> w(std::max(levels, 0));
  for (int k = 0; k < levels; ++k) w[k] = std::ldexp(1.0, levels - k - 1);
  return w;
}

std::vector<double> partition_priorities(double total, int levels,
                                         const std::vector<double>& weights) {
  if (levels < 1) throw ConfigError("priority levels must be at least 1");
  if (static_cast<int>(weights.size()) != levels)
    throw ConfigError("one priority weight per level is required");
  for (int k = 0; k < levels; ++k) {
    if (!(weights[k] > 0.0)) throw ConfigError("priority weights must be positive");
    if (k > 0 && weights[k] > weights[k - 1])
      throw ConfigError("priority weights must be non-increasing");
  }
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> shares(levels);
  for (int k = 0; k < levels; ++k) shares[k] = total * weights[k] / sum;
  return shares;
}

std::vector<Path> enumerate_paths(const Topology& topology, int per_pair_limit) {
  std::vector<Path> out;
  if (per_pair_limit <= 0) return out;
  const int n_dev = topology.device_count();

  // Neighbors sorted by (device, link) so the DFS yields walks in
  // lexicographic order of their device sequence.
  std::vector<std::vector<std::pair<int, int>>> adj(n_dev);
  for (const auto& link : topology.links) {
    adj[link.from].push_back({link.to, link.id});
    adj[link.to].push_back({link.from, link.id});
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  for (int poa : topology.edge_devices()) {
    for (const auto& node : topology.nodes) {
      const int target = node.device;
      if (target == poa) continue;
      std::vector<std::pair<std::vector<int>, std::vector<int>>> found;
      std::vector<int> dev{poa}, lnk;
      std::vector<char> on_walk(n_dev, 0);
      on_walk[poa] = 1;
      for (int depth = 1; depth < n_dev && static_cast<int>(found.size()) < per_pair_limit; ++depth) {
        std::function<void()> dfs = [&]() {
          if (static_cast<int>(found.size()) >= per_pair_limit) return;
          const int here = dev.back();
          if (static_cast<int>(lnk.size()) == depth) {
            if (here == target) found.push_back({dev, lnk});
            return;
          }
          if (here == target) return;
          for (const auto& [next, link] : adj[here]) {
            if (on_walk[next]) continue;
            on_walk[next] = 1;
            dev.push_back(next);
            lnk.push_back(link);
            dfs();
            dev.pop_back();
            lnk.pop_back();
            on_walk[next] = 0;
          }
        };
        dfs();
      }
      for (auto& [devs, links] : found) {
        Path p;
        p.id = static_cast<int>(out.size());
        p.endpoint_device = poa;
        p.node_device = target;
        p.devices = devs;
        p.links = links;
        for (int j = static_cast<int>(devs.size()) - 2; j >= 0; --j) p.devices.push_back(devs[j]);
        for (int j = static_cast<int>(links.size()) - 1; j >= 0; --j) p.links.push_back(links[j]);
        finalize_path(p);
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

namespace {

struct Range {
  std::int64_t lo, hi;
};

Range read_range(const json& draws, const char* key, Range fallback) {
  if (!draws.contains(key)) return fallback;
  const auto& r = draws.at(key);
  if (!r.is_array() || r.size() != 2) throw ConfigError(std::string("draws.") + key + " must be [lo, hi]");
  Range out{r[0].get<std::int64_t>(), r[1].get<std::int64_t>()};
  if (out.hi < out.lo) throw ConfigError(std::string("draws.") + key + ": empty range");
  return out;
}

std::vector<double> shares_for(const json& entry, const char* key, double total, int levels,
                               const std::vector<double>& weights) {
  if (entry.contains(key)) return entry.at(key).get<std::vector<double>>();
  return partition_priorities(total, levels, weights);
}

template <class T>
T get_or(const json& entry, const char* key, T drawn) {
  return entry.contains(key) ? entry.at(key).get<T>() : drawn;
}

}  // namespace

Topology build_topology(const json& spec) {
  try {
    Topology t;
    t.priority_levels = spec.value("priority_levels", 1);
    if (t.priority_levels < 1) throw ConfigError("priority_levels must be at least 1");
    t.seed = spec.value("seed", std::uint64_t{0});
    const auto weights = spec.contains("priority_weights")
                             ? spec.at("priority_weights").get<std::vector<double>>()
                             : default_priority_weights(t.priority_levels);
    const json draws = spec.value("draws", json::object());
    const Range capacity = read_range(draws, "capacity", {250, 300});
    const Range unit_energy = read_range(draws, "energy_per_unit", {10, 20});
    const Range transition = read_range(draws, "energy_per_transition", {100, 200});
    if (capacity.lo <= 0 || unit_energy.lo <= 0 || transition.lo < 0)
      throw ConfigError("draw ranges must be positive");

    Rng rng(t.seed);
    const json devices = spec.value("devices", json::array());
    const json links = spec.value("links", json::array());
    const json nodes = spec.value("nodes", json::array());

    for (std::size_t n = 0; n < devices.size(); ++n) {
      const auto& e = devices[n];
      NetworkDevice d;
      d.id = static_cast<int>(n);
      const double bw = static_cast<double>(rng.uniform_int(capacity.lo, capacity.hi));
      const double en = static_cast<double>(rng.uniform_int(unit_energy.lo, unit_energy.hi));
      d.total_bandwidth = get_or(e, "bandwidth", bw);
      d.energy_per_unit = get_or(e, "energy_per_unit", en);
      d.priority_bandwidth =
          shares_for(e, "priority_bandwidth", d.total_bandwidth, t.priority_levels, weights);
      t.devices.push_back(std::move(d));
    }
    std::vector<int> degree(devices.size(), 0);
    for (std::size_t l = 0; l < links.size(); ++l) {
      const auto& e = links[l];
      if (!e.contains("endpoints")) throw ConfigError("link " + std::to_string(l) + ": missing endpoints");
      const auto ends = e.at("endpoints").get<std::vector<int>>();
      if (ends.size() != 2) throw ConfigError("link " + std::to_string(l) + ": needs two endpoints");
      Link link;
      link.id = static_cast<int>(l);
      link.from = ends[0];
      link.to = ends[1];
      if (link.from < 0 || link.to < 0 || link.from >= static_cast<int>(devices.size()) ||
          link.to >= static_cast<int>(devices.size()))
        throw ConfigError("link " + std::to_string(l) + ": unknown device");
      ++degree[link.from];
      ++degree[link.to];
      const double bw = static_cast<double>(rng.uniform_int(capacity.lo, capacity.hi));
      link.total_bandwidth = get_or(e, "bandwidth", bw);
      link.priority_bandwidth =
          shares_for(e, "priority_bandwidth", link.total_bandwidth, t.priority_levels, weights);
      t.links.push_back(std::move(link));
    }
    for (std::size_t n = 0; n < devices.size(); ++n)
      t.devices[n].is_edge = devices[n].value("edge", degree[n] == 1);

    for (std::size_t v = 0; v < nodes.size(); ++v) {
      const auto& e = nodes[v];
      if (!e.contains("device")) throw ConfigError("node " + std::to_string(v) + ": no attachment device");
      ComputeNode node;
      node.id = static_cast<int>(v);
      node.device = e.at("device").get<int>();
      if (node.device < 0 || node.device >= static_cast<int>(devices.size()))
        throw ConfigError("node " + std::to_string(v) + ": unknown device");
      const double cap = static_cast<double>(rng.uniform_int(capacity.lo, capacity.hi));
      const double en = static_cast<double>(rng.uniform_int(unit_energy.lo, unit_energy.hi));
      const double tr = static_cast<double>(rng.uniform_int(transition.lo, transition.hi));
      node.total_capacity = get_or(e, "capacity", cap);
      node.energy_per_unit = get_or(e, "energy_per_unit", en);
      node.energy_per_transition = get_or(e, "energy_per_transition", tr);
      node.priority_capacity =
          shares_for(e, "priority_capacity", node.total_capacity, t.priority_levels, weights);
      t.nodes.push_back(std::move(node));
    }

    if (spec.contains("paths")) {
      const auto& paths = spec.at("paths");
      for (std::size_t p = 0; p < paths.size(); ++p) {
        const auto& e = paths[p];
        Path path;
        path.id = static_cast<int>(p);
        path.devices = e.at("devices").get<std::vector<int>>();
        path.links = e.at("links").get<std::vector<int>>();
        if (path.devices.empty()) throw ConfigError("path " + std::to_string(p) + ": empty walk");
        path.endpoint_device = path.devices.front();
        path.node_device = e.value("node_device", path.devices[path.devices.size() / 2]);
        finalize_path(path);
        t.paths.push_back(std::move(path));
      }
    } else {
      t.paths = enumerate_paths(t, spec.value("paths_per_pair", 3));
    }
    t.validate();
    return t;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("topology description: ") + e.what());
  }
}

json topology_to_json(const Topology& t) {
  json out;
  out["seed"] = t.seed;
  out["priority_levels"] = t.priority_levels;
  json devices = json::array();
  for (const auto& d : t.devices)
    devices.push_back({{"id", d.id},
                       {"bandwidth", d.total_bandwidth},
                       {"priority_bandwidth", d.priority_bandwidth},
                       {"energy_per_unit", d.energy_per_unit},
                       {"edge", d.is_edge}});
  out["devices"] = std::move(devices);
  json links = json::array();
  for (const auto& l : t.links)
    links.push_back({{"id", l.id},
                     {"endpoints", {l.from, l.to}},
                     {"bandwidth", l.total_bandwidth},
                     {"priority_bandwidth", l.priority_bandwidth}});
  out["links"] = std::move(links);
  json nodes = json::array();
  for (const auto& v : t.nodes)
    nodes.push_back({{"id", v.id},
                     {"device", v.device},
                     {"capacity", v.total_capacity},
                     {"priority_capacity", v.priority_capacity},
                     {"energy_per_unit", v.energy_per_unit},
                     {"energy_per_transition", v.energy_per_transition}});
  out["nodes"] = std::move(nodes);
  json paths = json::array();
  for (const auto& p : t.paths)
    paths.push_back({{"id", p.id}, {"node_device", p.node_device}, {"devices", p.devices}, {"links", p.links}});
  out["paths"] = std::move(paths);
  return out;
}

}  // namespace pira
