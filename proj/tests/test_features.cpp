#include "doctest.h"
#include "support.hpp"

using namespace pira;
using testing::json;

namespace {

// PoA 0 -- core 1 with a node; the link's only queue holds 6.
Topology fixture() {
  json spec = {{"priority_levels", 1},
               {"devices",
                {json::object({{"bandwidth", 100.0}, {"energy_per_unit", 2.0}, {"edge", true}}),
                 json::object({{"bandwidth", 100.0}, {"energy_per_unit", 4.0}, {"edge", false}})}},
               {"links", {json::object({{"endpoints", {0, 1}}, {"bandwidth", 6.0}})}},
               {"nodes", {testing::node_spec(1, 50, 3.0, 8.0)}}};
  return build_topology(spec);
}

}  // namespace

TEST_CASE("idle system: capacity slack is the full partition minus the demand") {
  Rng rng(71);
  const auto s = testing::random_scenario(rng, 3, 1, 4);
  const StateEncoder enc(s.topology, s.catalog, s.latency);
  const AllocationState st(s.topology, s.catalog);
  const auto& r = s.workload.slots[0][0];
  const auto f = enc.encode(st, r);
  const int K = s.topology.priority_levels;
  CHECK(f.nodes.cols() == 2 * K + 2);
  CHECK(f.paths.cols() == 2 * K + 1);
  CHECK(f.nodes.allFinite());
  CHECK(f.paths.allFinite());
  for (int v = 0; v < s.topology.node_count(); ++v)
    for (int k = 0; k < K; ++k) {
      const double raw = s.topology.nodes[v].priority_capacity[k] - r.min_capacity;
      CHECK(f.nodes(v, k) == doctest::Approx(std::clamp(raw / enc.scales().capacity, -1.0, 1.0)));
    }
}

TEST_CASE("boot-cost feature vanishes on an active node") {
  const auto t = fixture();
  const auto cat = make_catalog(1, 2, 20);
  const StateEncoder enc(t, cat);
  AllocationState st(t, cat);
  const auto r = testing::request(0, 0, 0, 4, 2, 3);
  CHECK(enc.encode(st, r).nodes(0, 3) == doctest::Approx(1.0));   // 8 / max transition 8
  st.apply(r, {0, 0, 0, 0});
  const auto f = enc.encode(st, testing::request(1, 0, 0, 4, 2, 3));
  CHECK(f.nodes(0, 3) == 0.0);
  CHECK(f.nodes(0, 2) == doctest::Approx(3.0 / 4.0));
}

TEST_CASE("bandwidth slack is the bottleneck residual minus the demand") {
  const auto t = fixture();
  const auto cat = make_catalog(1, 1, 20);
  const StateEncoder enc(t, cat);
  const AllocationState st(t, cat);
  const auto r = testing::request(0, 0, 0, 4, 10, 3);
  const auto f = enc.encode(st, r);
  CHECK(f.paths(0, 0) * enc.scales().capacity == doctest::Approx(-4.0));
  CHECK(f.paths(0, 0) < 0.0);
  // links add transmission time only: PoA crossed twice, core once, link twice
  const double lat = 2.0 / (100.0 - 20.0) + 1.0 / (100.0 - 10.0) + 2.0 / 6.0;
  CHECK(f.paths(0, 1) == doctest::Approx((lat - 3.0) / 3.0));
  CHECK(f.paths(0, 2) == doctest::Approx((2.0 + 4.0 + 2.0) / enc.scales().path_energy));
}

TEST_CASE("paths from another PoA carry the sentinel") {
  auto spec = testing::line_spec(3, 2, 200.0);
  spec["devices"][2]["edge"] = true;
  spec["nodes"].push_back(testing::node_spec(1, 40));
  const auto t = build_topology(spec);
  const auto cat = make_catalog(1, 1, 20);
  const StateEncoder enc(t, cat);
  const auto f = enc.encode(AllocationState(t, cat), testing::request(0, 0, 0, 4, 2, 3));
  for (int p = 0; p < t.path_count(); ++p) {
    const bool serves = t.paths[p].endpoint_device == 0;
    CHECK(f.path_serves[p] == (serves ? 1.0 : 0.0));
    if (!serves)
      for (int c = 0; c < 4; ++c) CHECK(f.paths(p, c) == -1.0);
  }
}

TEST_CASE("features stay within [-1, 1] and are deterministic") {
  Rng rng(73);
  for (int trial = 0; trial < 40; ++trial) {
    const auto s = testing::random_scenario(rng, static_cast<int>(rng.uniform_int(2, 4)), 1, 6);
    const auto st = testing::random_state(s, rng, 60);
    const StateEncoder enc(s.topology, s.catalog, s.latency);
    const auto& r = s.workload.slots[0].back();
    const auto f = enc.encode(st, r);
    const auto g = enc.encode(st, r);
    CHECK(f.flatten() == g.flatten());
    CHECK(f.flatten().size() == enc.shape().flat_width());
    CHECK(f.shape() == enc.shape());
    CHECK(f.flatten().cwiseAbs().maxCoeff() <= 1.0);
    CHECK((f.adjacency.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    for (int i = 0; i < s.catalog.instance_count(); ++i)
      CHECK(f.instance_host.row(i).sum() == (st.instance_active(i) ? 1.0 : 0.0));
  }
}

TEST_CASE("node adjacency on a ring") {
  DeskScenarioConfig c;
  c.nodes = 4;
  const auto s = make_desk_scenario(c);
  const auto a = node_adjacency(s.topology, 1);
  for (int v = 0; v < 4; ++v) {
    CHECK(a(v, v) == doctest::Approx(1.0 / 3.0));
    CHECK(a(v, (v + 1) % 4) == doctest::Approx(1.0 / 3.0));
    CHECK(a(v, (v + 2) % 4) == 0.0);
  }
}
