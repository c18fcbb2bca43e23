#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pira/latency.hpp"
#include "pira/workload.hpp"

namespace pira {

/// Everything one run needs: graph, catalog, arrivals and objective weight.
/// Holds the topology by value; ledgers built on it must not outlive it.
struct Scenario {
  Topology topology;
  ServiceCatalog catalog;
  Workload workload;
  double alpha = 0.001;
  LatencyModel latency;
};

nlohmann::json scenario_to_json(const Scenario& s);
/// Accepts either the resolved form written by scenario_to_json or a
/// generator block {"desk": {...}}.
Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

enum class EnergyTier { High, Moderate, Low };

std::string to_string(EnergyTier tier);
EnergyTier energy_tier_from_string(const std::string& name);
/// Per-unit energy draw range of a tier: high [17, 20], moderate [13, 16], low [10, 12].
UniformRange tier_energy(EnergyTier tier);

/// Small ring-shaped system: `nodes` core devices in a ring, one compute
/// node on each, and `edge_devices` points of arrival hanging off the first
/// core devices. Node j and its core device use tiers[j] (the last tier
/// repeats when the list is shorter).
struct DeskScenarioConfig {
  int nodes = 3;
  int edge_devices = 1;
  int priority_levels = 4;
  int services = 2;
  int replicas = 2;
  double instance_capacity = 20.0;
  int paths_per_pair = 2;
  int horizon = 5;
  int requests_total = 10;
  double alpha = 0.001;
  std::vector<EnergyTier> tiers{EnergyTier::High, EnergyTier::Moderate, EnergyTier::Low};
  std::uint64_t seed = 1;
  LatencyModel latency;
};

nlohmann::json desk_config_to_json(const DeskScenarioConfig& c);
DeskScenarioConfig desk_config_from_json(const nlohmann::json& doc);
/// Topology description (build_topology input) of the desk system.
nlohmann::json desk_topology_spec(const DeskScenarioConfig& c);
Scenario make_desk_scenario(const DeskScenarioConfig& c);

}  // namespace pira
