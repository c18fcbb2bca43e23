#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "pira/topology.hpp"

namespace pira {

/// One service demand arriving in a single slot.
struct Request {
  int id = 0;
  int arrival_slot = 1;
  int poa = 0;             // edge device n_r
  int service = 0;         // s_r
  double min_capacity = 0.0;    // mbps
  double min_bandwidth = 0.0;   // mbps
  double max_latency = 0.0;     // ms
  double packet_size = 1.0;
  double profit = 0.0;

  bool operator==(const Request&) const = default;
};

struct Instance {
  int id = 0;
  int service = 0;
  double capacity = 0.0;

  bool operator==(const Instance&) const = default;
};

struct ServiceCatalog {
  std::vector<Instance> instances;

  bool operator==(const ServiceCatalog&) const = default;

  int instance_count() const { return static_cast<int>(instances.size()); }
  /// Distinct services, ascending.
  std::vector<int> services() const;
  bool offers(int service) const;
};

/// `services` distinct services, `replicas` interchangeable instances of
/// each, all with the same capacity. Instance ids are service-major.
ServiceCatalog make_catalog(int services, int replicas, double instance_capacity = 20.0);

/// Integer-uniform law on [lo, hi].
struct UniformRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  double mean() const { return 0.5 * static_cast<double>(lo + hi); }
};

/// Law of the number of requests arriving in one slot.
struct ArrivalLaw {
  enum class Kind { Fixed, Uniform };
  Kind kind = Kind::Fixed;
  int count = 1;        // Fixed
  int min_count = 0;    // Uniform
  int max_count = 0;
};

struct WorkloadConfig {
  int horizon = 1;
  /// When set, exactly this many requests are spread over the horizon,
  /// ceil(total / horizon) per slot until exhausted; overrides `arrivals`.
  int requests_total = -1;
  ArrivalLaw arrivals;
  UniformRange capacity{4, 8};
  UniformRange bandwidth{2, 10};
  UniformRange latency{1, 3};
  UniformRange packet_size{1, 1};
  UniformRange profit{5, 15};
  std::uint64_t seed = 0;
};

/// Requests grouped by slot; slots[t - 1] holds the arrivals of slot t.
struct Workload {
  std::vector<std::vector<Request>> slots;

  bool operator==(const Workload&) const = default;

  int horizon() const { return static_cast<int>(slots.size()); }
  int request_count() const;
};

/// Draws the per-slot request sets. PoAs are uniform over edge devices and
/// services uniform over the catalog's services.
Workload generate_workload(const Topology& topology, const ServiceCatalog& catalog,
                           const WorkloadConfig& config);

/// Throws ConfigError unless every field of `request` is admissible.
void validate_request(const Topology& topology, const ServiceCatalog& catalog, const Request& request);

nlohmann::json workload_to_json(const Workload& workload);
Workload workload_from_json(const nlohmann::json& doc);
nlohmann::json catalog_to_json(const ServiceCatalog& catalog);
ServiceCatalog catalog_from_json(const nlohmann::json& doc);
nlohmann::json request_to_json(const Request& r);
Request request_from_json(const nlohmann::json& doc);

}  // namespace pira
