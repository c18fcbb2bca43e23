#include "pira/scenario.hpp"

#include <fstream>
#include <sstream>

#include "pira/common.hpp"

namespace pira {

using nlohmann::json;

json scenario_to_json(const Scenario& s) {
  return {{"topology", topology_to_json(s.topology)},
          {"catalog", catalog_to_json(s.catalog)},
          {"workload", workload_to_json(s.workload)},
          {"alpha", s.alpha},
          {"latency_scale", s.latency.scale},
          {"c15_aggregate_load", s.latency.c15_aggregate_load}};
}

Scenario scenario_from_json(const json& doc) {
  try {
    if (doc.contains("desk")) return make_desk_scenario(desk_config_from_json(doc.at("desk")));
    Scenario s;
    s.topology = build_topology(doc.at("topology"));
    s.catalog = catalog_from_json(doc.at("catalog"));
    s.workload = workload_from_json(doc.value("workload", json::array()));
    s.alpha = doc.value("alpha", s.alpha);
    s.latency.scale = doc.value("latency_scale", s.latency.scale);
    s.latency.c15_aggregate_load = doc.value("c15_aggregate_load", s.latency.c15_aggregate_load);
    if (!(s.alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
    if (!(s.latency.scale > 0.0)) throw ConfigError("latency_scale must be positive");
    for (int t = 0; t < s.workload.horizon(); ++t)
      for (const auto& r : s.workload.slots[t]) {
        if (r.arrival_slot != t + 1)
          throw ConfigError("request " + std::to_string(r.id) + " listed under slot " + std::to_string(t + 1) +
                            " but arrives in slot " + std::to_string(r.arrival_slot));
        validate_request(s.topology, s.catalog, r);
      }
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("scenario file '" + path + "': " + e.what());
  }
  return scenario_from_json(doc);
}

std::string to_string(EnergyTier tier) {
  switch (tier) {
    case EnergyTier::High: return "high";
    case EnergyTier::Moderate: return "moderate";
    case EnergyTier::Low: return "low";
  }
  return "high";
}

EnergyTier energy_tier_from_string(const std::string& name) {
  if (name == "high") return EnergyTier::High;
  if (name == "moderate") return EnergyTier::Moderate;
  if (name == "low") return EnergyTier::Low;
  throw ConfigError("unknown energy tier '" + name + "'");
}

UniformRange tier_energy(EnergyTier tier) {
  switch (tier) {
    case EnergyTier::High: return {17, 20};
    case EnergyTier::Moderate: return {13, 16};
    case EnergyTier::Low: return {10, 12};
  }
  return {17, 20};
}

json desk_config_to_json(const DeskScenarioConfig& c) {
  json tiers = json::array();
  for (auto t : c.tiers) tiers.push_back(to_string(t));
  return {{"nodes", c.nodes},
          {"edge_devices", c.edge_devices},
          {"priority_levels", c.priority_levels},
          {"services", c.services},
          {"replicas", c.replicas},
          {"instance_capacity", c.instance_capacity},
          {"paths_per_pair", c.paths_per_pair},
          {"horizon", c.horizon},
          {"requests_total", c.requests_total},
          {"alpha", c.alpha},
          {"tiers", tiers},
          {"seed", c.seed},
          {"latency_scale", c.latency.scale},
          {"c15_aggregate_load", c.latency.c15_aggregate_load}};
}

DeskScenarioConfig desk_config_from_json(const json& doc) {
  DeskScenarioConfig c;
  try {
    c.nodes = doc.value("nodes", c.nodes);
    c.edge_devices = doc.value("edge_devices", c.edge_devices);
    c.priority_levels = doc.value("priority_levels", c.priority_levels);
    c.services = doc.value("services", c.services);
    c.replicas = doc.value("replicas", c.replicas);
    c.instance_capacity = doc.value("instance_capacity", c.instance_capacity);
    c.paths_per_pair = doc.value("paths_per_pair", c.paths_per_pair);
    c.horizon = doc.value("horizon", c.horizon);
    c.requests_total = doc.value("requests_total", c.requests_total);
    c.alpha = doc.value("alpha", c.alpha);
    if (doc.contains("tiers")) {
      c.tiers.clear();
      for (const auto& t : doc.at("tiers")) c.tiers.push_back(energy_tier_from_string(t.get<std::string>()));
    }
    c.seed = doc.value("seed", c.seed);
    c.latency.scale = doc.value("latency_scale", c.latency.scale);
    c.latency.c15_aggregate_load = doc.value("c15_aggregate_load", c.latency.c15_aggregate_load);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("desk scenario: ") + e.what());
  }
  return c;
}

namespace {

void check_desk(const DeskScenarioConfig& c) {
  if (c.nodes < 1) throw ConfigError("desk scenario: nodes must be at least 1");
  if (c.edge_devices < 1) throw ConfigError("desk scenario: edge_devices must be at least 1");
  if (c.services < 1 || c.replicas < 1) throw ConfigError("desk scenario: services and replicas must be positive");
  if (c.horizon < 1) throw ConfigError("desk scenario: horizon must be at least 1");
  if (c.requests_total < 0) throw ConfigError("desk scenario: requests_total must be non-negative");
  if (c.tiers.empty()) throw ConfigError("desk scenario: tiers must not be empty");
}

EnergyTier tier_of(const DeskScenarioConfig& c, int j) {
  return c.tiers[std::min<std::size_t>(static_cast<std::size_t>(j), c.tiers.size() - 1)];
}

}  // namespace

json desk_topology_spec(const DeskScenarioConfig& c) {
  check_desk(c);
  Rng rng(c.seed);
  const std::uint64_t topo_seed = rng.fork();
  const int V = c.nodes;
  json devices = json::array(), links = json::array(), nodes = json::array();
  for (int j = 0; j < V; ++j) {
    const auto range = tier_energy(tier_of(c, j));
    devices.push_back({{"edge", false}, {"energy_per_unit", static_cast<double>(rng.uniform_int(range.lo, range.hi))}});
  }
  for (int e = 0; e < c.edge_devices; ++e) devices.push_back(json::object({{"edge", true}}));
  if (V == 2) {
    links.push_back(json::object({{"endpoints", {0, 1}}}));
  } else if (V > 2) {
    for (int j = 0; j < V; ++j) links.push_back(json::object({{"endpoints", {j, (j + 1) % V}}}));
  }
  for (int e = 0; e < c.edge_devices; ++e) links.push_back(json::object({{"endpoints", {V + e, e % V}}}));
  for (int j = 0; j < V; ++j) {
    const auto range = tier_energy(tier_of(c, j));
    nodes.push_back({{"device", j}, {"energy_per_unit", static_cast<double>(rng.uniform_int(range.lo, range.hi))}});
  }
  return {{"seed", topo_seed},
          {"priority_levels", c.priority_levels},
          {"paths_per_pair", c.paths_per_pair},
          {"devices", devices},
          {"links", links},
          {"nodes", nodes}};
}

Scenario make_desk_scenario(const DeskScenarioConfig& c) {
  Scenario s;
  s.topology = build_topology(desk_topology_spec(c));
  s.catalog = make_catalog(c.services, c.replicas, c.instance_capacity);
  Rng rng(c.seed ^ 0xD1B54A32D192ED03ULL);
  WorkloadConfig w;
  w.horizon = c.horizon;
  w.requests_total = c.requests_total;
  w.seed = rng.fork();
  s.workload = generate_workload(s.topology, s.catalog, w);
  s.alpha = c.alpha;
  s.latency = c.latency;
  return s;
}

}  // namespace pira
