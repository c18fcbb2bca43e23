#include "pira/workload.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "pira/common.hpp"

namespace pira {

using nlohmann::json;

std::vector<int> ServiceCatalog::services() const {
  std::set<int> s;
  for (const auto& i : instances) s.insert(i.service);
  return {s.begin(), s.end()};
}

bool ServiceCatalog::offers(int service) const {
  return std::any_of(instances.begin(), instances.end(),
                     [service](const Instance& i) { return i.service == service; });
}

ServiceCatalog make_catalog(int services, int replicas, double instance_capacity) {
  if (services < 1 || replicas < 1) throw ConfigError("catalog needs at least one service and one replica");
  if (!(instance_capacity > 0.0)) throw ConfigError("instance capacity must be positive");
  ServiceCatalog c;
  for (int s = 0; s < services; ++s)
    for (int j = 0; j < replicas; ++j)
      c.instances.push_back({static_cast<int>(c.instances.size()), s, instance_capacity});
  return c;
}

int Workload::request_count() const {
  int n = 0;
  for (const auto& s : slots) n += static_cast<int>(s.size());
  return n;
}

namespace {

void check_positive(const UniformRange& r, const char* what) {
  if (r.hi < r.lo) throw ConfigError(std::string(what) + ": empty range");
  if (r.lo <= 0) throw ConfigError(std::string(what) + ": support must be positive");
}

double draw(Rng& rng, const UniformRange& r) {
  return static_cast<double>(rng.uniform_int(r.lo, r.hi));
}

}  // namespace

void validate_request(const Topology& topology, const ServiceCatalog& catalog, const Request& r) {
  const std::string what = "request " + std::to_string(r.id);
  if (!(r.min_capacity > 0 && r.min_bandwidth > 0 && r.max_latency > 0 && r.packet_size > 0 &&
        r.profit > 0))
    throw ConfigError(what + ": QoS fields must be positive");
  if (r.poa < 0 || r.poa >= topology.device_count() || !topology.devices[r.poa].is_edge)
    throw ConfigError(what + ": PoA is not an edge device");
  if (!catalog.offers(r.service)) throw ConfigError(what + ": no instance offers its service");
  if (r.arrival_slot < 1) throw ConfigError(what + ": slots start at 1");
}

Workload generate_workload(const Topology& topology, const ServiceCatalog& catalog,
                           const WorkloadConfig& config) {
  if (config.horizon < 1) throw ConfigError("horizon must be at least 1");
  check_positive(config.capacity, "capacity");
  check_positive(config.bandwidth, "bandwidth");
  check_positive(config.latency, "latency");
  check_positive(config.packet_size, "packet_size");
  check_positive(config.profit, "profit");
  const auto& law = config.arrivals;
  if (config.requests_total < 0) {
    if (law.kind == ArrivalLaw::Kind::Fixed && law.count < 0)
      throw ConfigError("arrival count must be non-negative");
    if (law.kind == ArrivalLaw::Kind::Uniform && (law.min_count < 0 || law.max_count < law.min_count))
      throw ConfigError("arrival range must be non-negative and non-empty");
  }
  const auto edges = topology.edge_devices();
  const auto services = catalog.services();

  Rng rng(config.seed);
  Workload w;
  w.slots.resize(config.horizon);
  int next_id = 0;
  int remaining = config.requests_total;
  const int per_slot =
      config.requests_total >= 0 ? (config.requests_total + config.horizon - 1) / config.horizon : 0;
  for (int t = 1; t <= config.horizon; ++t) {
    int count = 0;
    if (config.requests_total >= 0) {
      count = std::min(per_slot, remaining);
      remaining -= count;
    } else if (law.kind == ArrivalLaw::Kind::Fixed) {
      count = law.count;
    } else {
      count = static_cast<int>(rng.uniform_int(law.min_count, law.max_count));
    }
    if (count > 0 && edges.empty()) throw ConfigError("topology has no edge device to act as PoA");
    if (count > 0 && services.empty()) throw ConfigError("catalog offers no service");
    for (int j = 0; j < count; ++j) {
      Request r;
      r.id = next_id++;
      r.arrival_slot = t;
      r.poa = edges[rng.index(edges.size())];
      r.service = services[rng.index(services.size())];
      r.min_capacity = draw(rng, config.capacity);
      r.min_bandwidth = draw(rng, config.bandwidth);
      r.max_latency = draw(rng, config.latency);
      r.packet_size = draw(rng, config.packet_size);
      r.profit = draw(rng, config.profit);
      w.slots[t - 1].push_back(r);
    }
  }
  return w;
}

json request_to_json(const Request& r) {
  return {{"id", r.id},
          {"slot", r.arrival_slot},
          {"poa", r.poa},
          {"service", r.service},
          {"min_capacity", r.min_capacity},
          {"min_bandwidth", r.min_bandwidth},
          {"max_latency", r.max_latency},
          {"packet_size", r.packet_size},
          {"profit", r.profit}};
}

Request request_from_json(const json& doc) {
  Request r;
  r.id = doc.at("id").get<int>();
  r.arrival_slot = doc.at("slot").get<int>();
  r.poa = doc.at("poa").get<int>();
  r.service = doc.at("service").get<int>();
  r.min_capacity = doc.at("min_capacity").get<double>();
  r.min_bandwidth = doc.at("min_bandwidth").get<double>();
  r.max_latency = doc.at("max_latency").get<double>();
  r.packet_size = doc.at("packet_size").get<double>();
  r.profit = doc.at("profit").get<double>();
  return r;
}

json workload_to_json(const Workload& w) {
  json out = json::array();
  for (const auto& slot : w.slots) {
    json s = json::array();
    for (const auto& r : slot) s.push_back(request_to_json(r));
    out.push_back(std::move(s));
  }
  return out;
}

Workload workload_from_json(const json& doc) {
  try {
    Workload w;
    for (const auto& slot : doc) {
      std::vector<Request> s;
      for (const auto& r : slot) s.push_back(request_from_json(r));
      w.slots.push_back(std::move(s));
    }
    return w;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("workload: ") + e.what());
  }
}

json catalog_to_json(const ServiceCatalog& c) {
  json out = json::array();
  for (const auto& i : c.instances)
    out.push_back({{"id", i.id}, {"service", i.service}, {"capacity", i.capacity}});
  return out;
}

ServiceCatalog catalog_from_json(const json& doc) {
  try {
    ServiceCatalog c;
    for (std::size_t k = 0; k < doc.size(); ++k) {
      Instance i;
      i.id = static_cast<int>(k);
      i.service = doc[k].at("service").get<int>();
      i.capacity = doc[k].at("capacity").get<double>();
      if (!(i.capacity > 0.0)) throw ConfigError("instance capacity must be positive");
      c.instances.push_back(i);
    }
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("catalog: ") + e.what());
  }
}

}  // namespace pira
