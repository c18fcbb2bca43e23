#include "doctest.h"
#include "support.hpp"

using namespace pira;

namespace {

Topology small_topology() {
  auto spec = testing::line_spec(3);
  spec["devices"][2]["edge"] = true;
  spec["nodes"].push_back(testing::node_spec(1, 50));
  return build_topology(spec);
}

}  // namespace

TEST_CASE("default draws follow the request bounds") {
  const auto t = small_topology();
  const auto cat = make_catalog(3, 1);
  WorkloadConfig c;
  c.horizon = 200;
  c.arrivals.count = 60;
  c.seed = 3;
  const auto w = generate_workload(t, cat, c);
  CHECK(w.request_count() == 12000);
  double cap = 0, bw = 0, lat = 0, profit = 0;
  for (const auto& slot : w.slots)
    for (const auto& r : slot) {
      CHECK(r.min_capacity >= 4);
      CHECK(r.min_capacity <= 8);
      CHECK(r.min_bandwidth >= 2);
      CHECK(r.min_bandwidth <= 10);
      CHECK(r.max_latency >= 1);
      CHECK(r.max_latency <= 3);
      CHECK(r.packet_size == 1);
      CHECK(r.profit >= 5);
      CHECK(r.profit <= 15);
      CHECK(cat.offers(r.service));
      CHECK(t.devices[r.poa].is_edge);
      CHECK_NOTHROW(validate_request(t, cat, r));
      cap += r.min_capacity;
      bw += r.min_bandwidth;
      lat += r.max_latency;
      profit += r.profit;
    }
  const double n = w.request_count();
  CHECK(cap / n == doctest::Approx(6).epsilon(0.05));
  CHECK(bw / n == doctest::Approx(6).epsilon(0.05));
  CHECK(lat / n == doctest::Approx(2).epsilon(0.05));
  CHECK(profit / n == doctest::Approx(10).epsilon(0.05));
}

TEST_CASE("zero arrivals give an empty workload") {
  WorkloadConfig c;
  c.horizon = 1;
  c.arrivals.count = 0;
  const auto w = generate_workload(small_topology(), make_catalog(1, 1), c);
  CHECK(w.horizon() == 1);
  CHECK(w.request_count() == 0);
}

TEST_CASE("same seed gives the same stream; ids are unique") {
  const auto t = small_topology();
  const auto cat = make_catalog(2, 2);
  WorkloadConfig c;
  c.horizon = 4;
  c.requests_total = 10;
  c.seed = 99;
  const auto a = generate_workload(t, cat, c);
  const auto b = generate_workload(t, cat, c);
  CHECK(a == b);
  CHECK(workload_to_json(a).dump() == workload_to_json(b).dump());
  CHECK(workload_from_json(workload_to_json(a)) == a);
  // ceil(10 / 4) = 3 per slot until exhausted
  CHECK(a.slots[0].size() == 3);
  CHECK(a.slots[1].size() == 3);
  CHECK(a.slots[2].size() == 3);
  CHECK(a.slots[3].size() == 1);
  std::vector<int> ids;
  for (int t2 = 0; t2 < a.horizon(); ++t2)
    for (const auto& r : a.slots[t2]) {
      ids.push_back(r.id);
      CHECK(r.arrival_slot == t2 + 1);
    }
  std::sort(ids.begin(), ids.end());
  CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
  c.seed = 100;
  CHECK_FALSE(generate_workload(t, cat, c) == a);
}

TEST_CASE("requests for services outside the catalog are rejected") {
  const auto t = small_topology();
  const auto cat = make_catalog(1, 1);
  auto r = testing::request(0, 0, 5, 4, 4, 2);
  CHECK_THROWS_AS(validate_request(t, cat, r), ConfigError);
  r.service = 0;
  r.poa = 1;   // not an edge device
  CHECK_THROWS_AS(validate_request(t, cat, r), ConfigError);
}

TEST_CASE("catalog layout is service-major") {
  const auto cat = make_catalog(2, 3, 15);
  REQUIRE(cat.instance_count() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(cat.instances[i].id == i);
    CHECK(cat.instances[i].service == i / 3);
    CHECK(cat.instances[i].capacity == 15);
  }
  CHECK(cat.services() == std::vector<int>{0, 1});
  CHECK(catalog_from_json(catalog_to_json(cat)) == cat);
}
