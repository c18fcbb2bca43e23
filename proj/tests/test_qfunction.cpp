#include <map>

#include "doctest.h"
#include "gradcheck.hpp"

using namespace pira;
using testing::json;

TEST_CASE("dueling combination") {
  Eigen::VectorXd adv(2);
  adv << 1, 3;
  const auto q = nn::dueling_combine(2.0, adv);
  CHECK(q[0] == doctest::Approx(1.0));
  CHECK(q[1] == doctest::Approx(3.0));
  const Eigen::VectorXd shifted = adv.array() + 17.5;
  CHECK((nn::dueling_combine(2.0, shifted) - q).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((nn::dueling_combine(2.0, shifted, true) - nn::dueling_combine(2.0, adv, true)).cwiseAbs().maxCoeff() < 1e-12);
  const auto p = nn::dueling_combine(2.0, adv, true);
  CHECK(p[0] == doctest::Approx(-2.0));
  CHECK(p[1] == doctest::Approx(2.0));
}

TEST_CASE("layer gradients agree with central differences") {
  Rng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    CHECK(testing::check_dense(rng) < 1e-6);
    CHECK(testing::check_message_passing(rng) < 1e-6);
    CHECK(testing::check_dueling(rng, false) < 1e-6);
    CHECK(testing::check_dueling(rng, true) < 1e-6);
  }
}

TEST_CASE("whole-network gradients agree with central differences") {
  Rng rng(103);
  for (auto kind : {Architecture::Kind::Graph, Architecture::Kind::Flat})
    for (bool product : {false, true}) {
      Architecture a;
      a.kind = kind;
      a.width = 4;
      a.head_width = 3;
      a.dueling_product = product;
      CHECK(testing::check_qfunction(rng, a) < 1e-5);
    }
  for (int trial = 0; trial < 5; ++trial) CHECK(testing::check_qfunction(rng, testing::random_architecture(rng)) < 1e-5);
}

TEST_CASE("zero weights give zero Q") {
  Rng rng(107);
  auto nc = testing::network_case(rng, 1);
  QFunction qf(nc.states[0].shape(), {}, 1);
  qf.set_parameters(std::vector<double>(qf.parameter_count(), 0.0));
  const auto q = qf.q_values(nc.states[0]);
  CHECK(q.size() == qf.action_count());
  CHECK(q.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("targets equal to predictions leave the weights unchanged") {
  Rng rng(109);
  auto nc = testing::network_case(rng, 3);
  for (auto kind : {OptimizerConfig::Kind::Sgd, OptimizerConfig::Kind::Adam}) {
    OptimizerConfig opt;
    opt.kind = kind;
    QFunction qf(nc.states[0].shape(), {}, 2, opt);
    std::vector<const StateFeatures*> ptrs;
    for (const auto& f : nc.states) ptrs.push_back(&f);
    const Eigen::MatrixXd q = qf.q_values(ptrs);
    std::vector<TrainSample> batch;
    for (std::size_t j = 0; j < nc.states.size(); ++j) {
      const int a = static_cast<int>(j * 7 % qf.action_count());
      batch.push_back({&nc.states[j], a, q(static_cast<Eigen::Index>(j), a)});
    }
    std::vector<double> grad;
    CHECK(qf.loss_gradient(batch, grad) == 0.0);
    for (double g : grad) CHECK(g == 0.0);
    const auto before = qf.parameters();
    qf.train_step(batch, 0.1);
    CHECK(qf.parameters() == before);
  }
}

TEST_CASE("single-sample step equals sigma (Y - Q) grad Q") {
  Rng rng(113);
  auto nc = testing::network_case(rng, 1);
  Architecture arch;
  arch.width = 3;
  arch.head_width = 3;
  QFunction qf(nc.states[0].shape(), arch, 5);
  const int a = qf.action_count() / 2;
  const double y = 1.5;
  const double q = qf.q_values(nc.states[0])[a];
  auto w = qf.parameters();
  // dQ_a / dw by central differences
  std::vector<double> dq(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    auto p = w;
    p[j] += 1e-6;
    qf.set_parameters(p);
    const double up = qf.q_values(nc.states[0])[a];
    p[j] -= 2e-6;
    qf.set_parameters(p);
    dq[j] = (up - qf.q_values(nc.states[0])[a]) / 2e-6;
  }
  qf.set_parameters(w);
  const double sigma = 0.01;
  qf.train_step({{&nc.states[0], a, y}}, sigma);
  const auto after = qf.parameters();
  double diff = 0.0, norm = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double expected = sigma * (y - q) * dq[j];
    diff += std::pow(after[j] - w[j] - expected, 2);
    norm += expected * expected;
  }
  CHECK(std::sqrt(diff / norm) < 1e-6);
}

TEST_CASE("batched evaluation equals one-at-a-time evaluation") {
  Rng rng(127);
  auto nc = testing::network_case(rng, 4);
  for (auto kind : {Architecture::Kind::Graph, Architecture::Kind::Flat}) {
    Architecture arch;
    arch.kind = kind;
    QFunction qf(nc.states[0].shape(), arch, 9);
    std::vector<const StateFeatures*> ptrs;
    for (const auto& f : nc.states) ptrs.push_back(&f);
    const Eigen::MatrixXd all = qf.q_values(ptrs);
    for (std::size_t j = 0; j < ptrs.size(); ++j)
      CHECK((all.row(static_cast<Eigen::Index>(j)).transpose() - qf.q_values(nc.states[j])).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("relabelling compute nodes permutes Q-values the same way") {
  DeskScenarioConfig c;
  c.nodes = 4;
  c.seed = 3;
  const auto t0 = build_topology(desk_topology_spec(c));
  json spec = topology_to_json(t0);
  spec.erase("paths");
  const std::vector<int> perm{2, 0, 3, 1};   // new position of old node v
  json permuted = spec;
  for (int v = 0; v < 4; ++v) {
    permuted["nodes"][perm[v]] = spec["nodes"][v];
    permuted["nodes"][perm[v]].erase("id");
  }
  const auto t1 = build_topology(permuted);
  const auto cat = make_catalog(2, 2, 20);
  std::map<std::vector<int>, int> path_of;
  for (const auto& p : t1.paths) path_of[p.devices] = p.id;
  REQUIRE(t0.path_count() == t1.path_count());

  const auto r = testing::request(0, 4, 1, 5, 4, 3);
  AllocationState s0(t0, cat), s1(t1, cat);
  // one prior assignment, relabelled consistently
  const auto prior = testing::request(1, 4, 0, 6, 3, 3);
  const Action a0{0, 1, t0.paths_serving(4, 1).front(), 1};
  s0.apply(prior, a0);
  s1.apply(prior, {0, perm[1], path_of.at(t0.paths[a0.path].devices), 1});

  const StateEncoder e0(t0, cat), e1(t1, cat);
  const auto f0 = e0.encode(s0, r), f1 = e1.encode(s1, r);
  const QFunction qf(f0.shape(), {}, 77);
  const auto q0 = qf.q_values(f0), q1 = qf.q_values(f1);
  const ActionSpace sp0(t0, cat), sp1(t1, cat);
  for (int a = 0; a < sp0.size(); ++a) {
    auto act = sp0.action(a);
    act.path = path_of.at(t0.paths[act.path].devices);
    act.node = perm[act.node];
    CHECK(q1[sp1.index(act)] == doctest::Approx(q0[a]).epsilon(1e-10));
  }
}

TEST_CASE("training is bit-stable for a fixed seed and batch sequence") {
  Rng rng(131);
  auto nc = testing::network_case(rng, 3);
  auto run = [&] {
    QFunction qf(nc.states[0].shape(), {}, 42);
    for (int step = 0; step < 10; ++step) {
      std::vector<TrainSample> batch;
      for (std::size_t j = 0; j < nc.states.size(); ++j)
        batch.push_back({&nc.states[j], static_cast<int>((step * 5 + j) % qf.action_count()), 0.1 * step});
      qf.train_step(batch, 0.05);
    }
    return qf.parameters();
  };
  CHECK(run() == run());
}

TEST_CASE("checkpoint round-trip and shape checks") {
  Rng rng(137);
  auto nc = testing::network_case(rng, 1);
  Architecture arch;
  arch.rounds = 1;
  arch.dueling_product = true;
  const QFunction qf(nc.states[0].shape(), arch, 8);
  const auto doc = qf.to_json();
  CHECK(doc["format"] == "pira-qfunction");
  const auto back = QFunction::from_json(json::parse(doc.dump()));
  CHECK(back.same_weights(qf));
  CHECK(back.architecture() == arch);
  CHECK(back.q_values(nc.states[0]) == qf.q_values(nc.states[0]));

  FeatureShape other = nc.states[0].shape();
  other.nodes += 1;
  const QFunction wrong(other, {}, 1);
  CHECK_THROWS_AS(wrong.q_values(nc.states[0]), Error);
  CHECK_THROWS_AS(QFunction(FeatureShape{0, 1, 1, 1}, {}, 1), ConfigError);
}
