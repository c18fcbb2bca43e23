// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include "CLI11.hpp"
#include "gradcheck.hpp"
#include "pira/harness.hpp"
#include "support.hpp"

using namespace pira;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return testing::rel_err(a, b); }

// PoA 0 with one spoke per core device, a node on each spoke: every
// (node, walk to it) pair is structurally valid, so the max-OF action is
// often feasible.
Scenario random_star(Rng& rng) {
  const int V = static_cast<int>(rng.uniform_int(2, 4));
  json devices = json::array(), links = json::array(), nodes = json::array();
  devices.push_back({{"bandwidth", rng.uniform(20, 100)}, {"energy_per_unit", rng.uniform(0.1, 2)}, {"edge", true}});
  for (int j = 1; j <= V; ++j) {
    devices.push_back({{"bandwidth", rng.uniform(5, 60)}, {"energy_per_unit", rng.uniform(0.1, 2)}, {"edge", false}});
    links.push_back({{"endpoints", {0, j}}, {"bandwidth", rng.uniform(5, 60)}});
    nodes.push_back(testing::node_spec(j, rng.uniform(2, 30), rng.uniform(0.1, 2), rng.uniform(0, 15)));
  }
  Scenario s;
  s.topology = build_topology({{"priority_levels", rng.uniform_int(1, 2)},
                               {"paths_per_pair", 1},
                               {"devices", devices},
                               {"links", links},
                               {"nodes", nodes}});
  s.catalog = make_catalog(1, static_cast<int>(rng.uniform_int(1, 2)), rng.uniform(5, 20));
  s.alpha = rng.uniform(0.1, 1.0);
  const int R = static_cast<int>(rng.uniform_int(1, 4));
  std::vector<Request> slot;
  for (int i = 0; i < R; ++i)
    slot.push_back(testing::request(i, 0, 0, rng.uniform(1, 8), rng.uniform(1, 5), rng.uniform(0.3, 3),
                                    rng.uniform(5, 30)));
  s.workload.slots = {slot};
  return s;
}

/// Right service, the instance's current host if it has one, and a walk
/// serving that node; priority left random.
Action plausible_action(const Scenario& s, const AllocationState& st, const Request& r, Rng& rng) {
  auto a = testing::random_action(ActionSpace(s.topology, s.catalog), rng);
  std::vector<int> same;
  for (int i = 0; i < s.catalog.instance_count(); ++i)
    if (s.catalog.instances[i].service == r.service) same.push_back(i);
  if (!same.empty()) a.instance = same[rng.index(same.size())];
  if (const auto host = st.instance_host(a.instance)) a.node = *host;
  const auto serving = s.topology.paths_serving(r.poa, a.node);
  if (!serving.empty()) a.path = serving[rng.index(serving.size())];
  return a;
}

// 1. ------------------------------------------------------------------------

Outcome mm1_terms() {
  Rng rng(1001);
  double worst = 0.0;
  long terms = 0, link_mismatch = 0;
  int states = 0;
  while (states < 1000) {
    const auto s = testing::random_scenario(rng, static_cast<int>(rng.uniform_int(2, 4)), 1,
                                            static_cast<int>(rng.uniform_int(2, 8)));
    if (s.workload.slots.front().empty()) continue;
    LatencyModel model;
    model.c15_aggregate_load = states % 2 == 1;
    const auto st = testing::random_state(s, rng);
    if (st.assignments().empty()) continue;
    ++states;
    const auto& t = s.topology;
    const auto& as = st.assignments();
    for (const auto& a : as) {
      const int k = a.action.priority;
      const auto& path = t.paths[a.action.path];
      std::set<int> seen(path.devices.begin(), path.devices.end());
      for (int n : seen) {
        double lambda = 0.0;
        for (const auto& b : as)
          if (b.action.priority == k)
            for (int m : t.paths[b.action.path].devices) lambda += m == n ? b.request.min_bandwidth : 0.0;
        // the endpoint is listed at both ends: crossed out and back
        const double expected = 1.0 / (t.devices[n].priority_bandwidth[k] - lambda);
        worst = std::max(worst, rel(device_latency(st, a.request, n, k, model), expected));
        ++terms;
      }
      double lambda = 0.0;
      for (const auto& b : as)
        if (b.action.node == a.action.node && (model.c15_aggregate_load || b.action.priority == k))
          lambda += b.request.min_capacity;
      const double expected = 1.0 / (t.nodes[a.action.node].priority_capacity[k] - lambda);
      worst = std::max(worst, rel(node_latency(st, a.request, a.action.node, k, model), expected));
      ++terms;
      for (int l : path.links)
        if (link_latency(st, a.request, l, k, model) != a.request.packet_size / t.links[l].priority_bandwidth[k])
          ++link_mismatch;
    }
  }
  return {worst <= 1e-12 && link_mismatch == 0,
          fmt("%d states, %ld queue terms, max rel err %.2e, link mismatches %ld", states, terms, worst,
              link_mismatch)};
}

// 2. ------------------------------------------------------------------------

Outcome audit_equivalence() {
  Rng rng(2002);
  int pairs = 0, disagree = 0, trial = 0;
  std::map<Constraint, int> seen;
  int feasible = 0;
  while (pairs < 10000) {
    const auto s = trial++ % 2 ? random_star(rng)
                               : testing::random_scenario(rng, static_cast<int>(rng.uniform_int(2, 4)), 1,
                                                          static_cast<int>(rng.uniform_int(3, 10)));
    if (s.workload.slots.front().empty()) continue;
    const auto st = testing::random_state(s, rng, 6);
    const ActionSpace space(s.topology, s.catalog);
    for (int j = 0; j < 10; ++j) {
      const auto& reqs = s.workload.slots.front();
      const auto& r = reqs[rng.index(reqs.size())];
      if (st.assignment_of(r.id)) continue;
      const auto a = rng.uniform01() < 0.6 ? plausible_action(s, st, r, rng) : testing::random_action(space, rng);
      const auto ledger = check_admission(st, r, a, s.latency);
      auto list = st.assignments();
      list.push_back({r, a});
      const auto scratch = audit_slot(s.topology, s.catalog, list, AuditScope::Full, s.latency);
      if (ledger.violated != scratch.violated) ++disagree;
      feasible += ledger.feasible();
      for (auto c : ledger.violated) ++seen[c];
      if (++pairs == 10000) break;
    }
  }
  std::string hit;
  for (const auto& [c, n] : seen) hit += fmt(" %s:%d", to_string(c).c_str(), n);
  return {disagree == 0, fmt("%d pairs (%d feasible), %d disagreements; violations seen", pairs, feasible, disagree) + hit};
}

// 3. ------------------------------------------------------------------------

Outcome energy_accounting() {
  long sequences = 0, xor_mismatch = 0;
  for (int len = 0; len <= 10; ++len)
    for (unsigned bits = 0; bits < (1u << len); ++bits) {
      std::vector<std::uint8_t> seq(len);
      for (int i = 0; i < len; ++i) seq[i] = (bits >> i) & 1u;
      int flips = 0, prev = 0;
      for (int x : seq) {
        flips += (x ^ prev);
        prev = x;
      }
      if (count_transitions(seq) != flips) ++xor_mismatch;
      ++sequences;
    }

  Rng rng(3003);
  double worst = 0.0;
  int traces = 0;
  while (traces < 500) {
    const auto s = testing::random_scenario(rng, static_cast<int>(rng.uniform_int(2, 4)),
                                            static_cast<int>(rng.uniform_int(1, 5)),
                                            static_cast<int>(rng.uniform_int(1, 15)));
    const auto tr = testing::random_feasible_trace(s, rng, 0.8);
    ++traces;
    const auto& t = s.topology;
    std::vector<double> dev(t.device_count(), 0.0), svc(t.node_count(), 0.0), boot(t.node_count(), 0.0);
    std::vector<int> prev(t.node_count(), 0);
    for (const auto& slot : tr.slots) {
      std::vector<int> on(t.node_count(), 0);
      for (const auto& a : slot.accepted) {
        const auto& walk = t.paths[a.action.path].devices;
        for (int n : walk) dev[n] += t.devices[n].energy_per_unit * a.request.min_bandwidth;
        svc[a.action.node] += t.nodes[a.action.node].energy_per_unit * a.request.min_capacity;
        on[a.action.node] = 1;
      }
      for (int v = 0; v < t.node_count(); ++v) {
        if (on[v] != prev[v]) boot[v] += t.nodes[v].energy_per_transition;
        prev[v] = on[v];
      }
    }
    const auto d = device_energy(t, tr);
    const auto n = node_energy(t, tr);
    double total = 0.0;
    for (int i = 0; i < t.device_count(); ++i) {
      worst = std::max(worst, rel(d[i], dev[i]));
      total += dev[i];
    }
    for (int v = 0; v < t.node_count(); ++v) {
      worst = std::max(worst, rel(n[v].service, svc[v]));
      worst = std::max(worst, rel(n[v].transition, boot[v]));
      total += svc[v] + boot[v];
    }
    worst = std::max(worst, rel(energy_ledger(t, tr).total(), total));
  }
  return {xor_mismatch == 0 && worst <= 1e-12,
          fmt("%ld sequences (%ld mismatches); %d traces, max rel err %.2e", sequences, xor_mismatch, traces, worst)};
}

// 4. ------------------------------------------------------------------------

Outcome oracle_exactness() {
  Rng rng(4004);
  int instances = 0, exhaustive = 0, beaten = 0, exhaustive_diff = 0;
  double worst_gap = 0.0;
  while (instances < 50) {
    const int V = static_cast<int>(rng.uniform_int(2, 3));
    const int T = static_cast<int>(rng.uniform_int(1, 3));
    const auto s = testing::random_scenario(rng, V, T, static_cast<int>(rng.uniform_int(T, 4 * T)));
    bool fits = true;
    for (const auto& slot : s.workload.slots) fits = fits && slot.size() <= 4;
    if (!fits) continue;
    ++instances;
    const auto sol = solve_horizon(s.topology, s.catalog, s.workload, s.alpha, s.latency);
    for (int k = 0; k < 10000; ++k) {
      const auto tr = testing::random_feasible_trace(s, rng, rng.uniform(0.3, 1.0));
      const double of = objective_value(s.topology, tr, s.alpha);
      if (of > sol.objective + 1e-9 * std::max(1.0, std::abs(sol.objective))) ++beaten;
    }
    const double A = ActionSpace(s.topology, s.catalog).size() + 1.0;
    const double leaves = std::pow(A, s.workload.request_count());
    if (leaves <= 2e7) {
      ++exhaustive;
      const double best = testing::exhaustive_objective(s);
      worst_gap = std::max(worst_gap, std::abs(best - sol.objective));
      if (std::abs(best - sol.objective) > 1e-9 * std::max(1.0, std::abs(best))) ++exhaustive_diff;
    }
  }
  return {beaten == 0 && exhaustive_diff == 0 && exhaustive > 0,
          fmt("%d instances x 10^4 traces: %d beat the oracle; exhaustive on %d, %d differ (max gap %.2e)",
              instances, beaten, exhaustive, exhaustive_diff, worst_gap)};
}

// 5. ------------------------------------------------------------------------

Outcome gradient_checks() {
  Rng rng(5005);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    worst = std::max(worst, testing::check_dense(rng));
    worst = std::max(worst, testing::check_message_passing(rng));
    worst = std::max(worst, testing::check_dueling(rng, false));
    worst = std::max(worst, testing::check_dueling(rng, true));
    worst = std::max(worst, testing::check_qfunction(rng, testing::random_architecture(rng)));
  }
  return {worst <= 1e-4, fmt("100 configurations, every layer type and whole networks, max rel err %.2e", worst)};
}

// 6. ------------------------------------------------------------------------

Outcome d3ql_mechanics() {
  std::vector<std::string> bad;
  Eigen::VectorXd qm(3), qt(3);
  qm << 0.2, 1.0, 0.5;
  qt << 3.0, 2.0, 1.0;
  if (std::abs(double_q_target(1.0, false, qm, qt, 0.9) - 2.8) > 1e-12) bad.push_back("bootstrap");
  if (double_q_target(0.5, true, qm, qt, 0.9) != 0.5) bad.push_back("terminal");
  Eigen::VectorXd a(2), b(2);
  a << 1.0, 0.0;
  b << 0.0, 1.0;
  if (std::abs(double_q_target(0.3, false, a, b, 0.9) - 0.3) > 1e-12) bad.push_back("argmax divergence");

  Rng rng(6006);
  double shift_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd adv = Eigen::VectorXd::Random(static_cast<int>(rng.uniform_int(1, 20)));
    const double v = rng.uniform(-3, 3), c = rng.uniform(-100, 100);
    for (bool product : {false, true}) {
      const Eigen::VectorXd shifted = adv.array() + c;
      shift_err = std::max(shift_err, (nn::dueling_combine(v, adv, product) -
                                       nn::dueling_combine(v, shifted, product)).cwiseAbs().maxCoeff());
    }
  }
  if (shift_err > 1e-10) bad.push_back("shift invariance");

  const auto s = testing::random_scenario(rng, 3, 3, 10);
  AgentConfig cfg;
  cfg.episodes = 20;
  cfg.target_sync = 13;
  cfg.batch_size = 8;
  cfg.warmup = 8;
  cfg.architecture.width = 16;
  cfg.architecture.head_width = 16;
  cfg.alpha = s.alpha;
  long syncs = 0, mismatched = 0, stale = 0;
  std::vector<double> frozen;
  run_training(s.topology, s.catalog, s.workload, cfg, 1, [&](const StepView& view) {
    if (view.synced) {
      ++syncs;
      if (view.target->parameters() != view.main->parameters()) ++mismatched;
      frozen = view.target->parameters();
    } else if (!frozen.empty() && view.target->parameters() != frozen) {
      ++stale;
    }
  });
  if (mismatched || stale || syncs == 0) bad.push_back("target sync");
  std::string detail = fmt("targets 2.8 / 0.5 / crafted; shift err %.1e; %ld syncs, %ld bit mismatches, "
                           "%ld off-sync target changes", shift_err, syncs, mismatched, stale);
  for (const auto& x : bad) detail += "; FAILED " + x;
  return {bad.empty(), detail};
}

// 7. ------------------------------------------------------------------------


Outcome reward_contract() {
  Rng rng(7007);
  long rewards = 0, out_of_range = 0, infeasible_nonzero = 0, best_not_one = 0, feasible_zero = 0, best_cases = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const auto s = trial % 2 ? random_star(rng)
                             : testing::random_scenario(rng, static_cast<int>(rng.uniform_int(2, 3)), 1,
                                                        static_cast<int>(rng.uniform_int(1, 6)));
    if (s.workload.slots.front().empty()) continue;
    const auto st = testing::random_state(s, rng);
    const auto& reqs = s.workload.slots.front();
    auto r = reqs[rng.index(reqs.size())];
    r.id = 1000000 + trial;
    const ActionSpace space(s.topology, s.catalog);
    double hi = -1e300;
    for (int a = 0; a < space.size(); ++a) hi = std::max(hi, action_objective(st, r, space.action(a), s.alpha));
    auto record = record_slot(st);
    for (int a = 0; a < space.size(); ++a) {
      const Action act = space.action(a);
      const double w = compute_reward(st, r, act, s.alpha, s.latency);
      auto list = record.accepted;
      list.push_back({r, act});
      const bool feasible = audit_slot(s.topology, s.catalog, list, AuditScope::Full, s.latency).feasible();
      ++rewards;
      if (!(w >= 0.0 && w <= 1.0)) ++out_of_range;
      if (!feasible && w != 0.0) ++infeasible_nonzero;
      if (feasible && w <= 0.0) ++feasible_zero;
      if (feasible && action_objective(st, r, act, s.alpha) == hi) {
        ++best_cases;
        if (w != 1.0) ++best_not_one;
      }
    }
  }
  return {out_of_range == 0 && infeasible_nonzero == 0 && best_not_one == 0 && feasible_zero == 0 && best_cases > 0,
          fmt("%ld rewards: %ld outside [0,1], %ld infeasible non-zero, %ld feasible zero, "
              "%ld/%ld max-OF actions not 1",
              rewards, out_of_range, infeasible_nonzero, feasible_zero, best_not_one, best_cases)};
}

// 8. ------------------------------------------------------------------------

Outcome desk_sweep(const std::string& out_dir) {
  ExperimentPlan plan;
  plan.agent.episodes = 300;
  plan.seeds = 10;
  plan.validate();
  const auto table = run_experiment(plan, [](const MetricsRow& r) {
    std::fprintf(stderr, "  %s %-6s OF=%.4f supported=%d %s\n", r.run_id.c_str(), r.method.c_str(), r.objective,
                 r.supported, r.status.c_str());
  });
  if (!out_dir.empty()) export_table(table, out_dir);

  int not_ok = 0;
  for (const auto& r : table.rows) not_ok += r.status != "ok";
  std::map<std::pair<int, int>, std::map<std::string, double>> mean;
  for (const auto& a : table.aggregates) mean[{a.nodes, a.requests}][a.method] = a.objective_mean;
  std::map<std::pair<int, int>, bool> supportable;
  for (const auto& r : table.rows)
    if (r.method == "oracle") {
      auto [it, fresh] = supportable.try_emplace({r.nodes, r.requests}, true);
      it->second = it->second && r.status == "ok" && r.supported == r.requests;
    }

  auto geq = [](double a, double b) { return a >= b - 1e-9 * std::max(1.0, std::abs(b)); };
  int cells = 0, ordered = 0, sup_cells = 0, near = 0;
  double worst_ratio = 1e300;
  std::string lines;
  for (const auto& [cell, m] : mean) {
    ++cells;
    const double o = m.at("oracle"), g = m.at("orient"), f = m.at("flat"), r = m.at("rnd");
    const bool ok = geq(o, g) && geq(g, f) && geq(f, r);
    ordered += ok;
    const double ratio = g / o;
    if (supportable[cell]) {
      ++sup_cells;
      near += ratio >= 0.8;
      worst_ratio = std::min(worst_ratio, ratio);
    }
    lines += fmt("\n    V=%d R=%-2d oracle %8.3f orient %8.3f flat %8.3f rnd %8.3f  orient/oracle %.3f%s%s",
                 cell.first, cell.second, o, g, f, r, ratio, ok ? "" : "  ORDER BROKEN",
                 supportable[cell] ? "" : "  (not all supportable)");
  }
  const bool pass = not_ok == 0 && cells == 9 && ordered * 10 >= cells * 9 && near == sup_cells;
  return {pass, fmt("%d/%d cells ordered; %d/%d supportable cells at >= 80%% of oracle (worst %.3f); %d runs not ok",
                    ordered, cells, near, sup_cells, worst_ratio, not_ok) +
                    lines};
}

// 9. ------------------------------------------------------------------------

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) {
      std::ifstream in(e.path(), std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      files[fs::relative(e.path(), root).string()] = ss.str();
    }
  return files;
}

Outcome cli_determinism(const std::string& pira, const fs::path& work) {
  if (pira.empty() || !fs::exists(pira)) return {false, "pira executable not found: '" + pira + "'"};
  ExperimentPlan plan;
  plan.node_counts = {2, 3};
  plan.request_totals = {5};
  plan.seeds = 2;
  plan.scenario.horizon = 3;
  plan.agent.episodes = 5;
  const fs::path root = work / "run";
  const std::string q = "'" + root.string() + "'";
  const std::vector<std::string> commands{
      "gen --seed 7 --nodes 3 --requests-total 8 --out " + q + "/gen",
      "solve --scenario " + q + "/gen/scenario.json --out " + q + "/solve",
      "train --scenario " + q + "/gen/scenario.json --episodes 20 --seed 3 --out " + q + "/orient",
      "train --scenario " + q + "/gen/scenario.json --episodes 20 --seed 3 --method flat --out " + q + "/flat",
      "train --scenario " + q + "/gen/scenario.json --seed 3 --method rnd --out " + q + "/rnd",
      "sweep --config " + q + "/../plan.json --seed 11 --out " + q + "/sweep",
      "plot --input " + q + "/sweep/summary.csv --out " + q + "/plot",
  };
  fs::create_directories(work);
  {
    std::ofstream cfg(work / "plan.json");
    cfg << plan_to_json(plan).dump(2);
  }
  std::vector<std::map<std::string, std::string>> runs;
  for (int pass = 0; pass < 2; ++pass) {
    fs::remove_all(root);
    fs::create_directories(root);
    for (std::size_t i = 0; i < commands.size(); ++i) {
      const std::string cmd = "'" + pira + "' " + commands[i] + " > " + q + "/stdout_" + std::to_string(i) +
                              ".txt 2> " + q + "/stderr_" + std::to_string(i) + ".txt";
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: pira " + commands[i]};
    }
    runs.push_back(snapshot(root));
  }
  std::vector<std::string> differ;
  for (const auto& [name, bytes] : runs[0]) {
    const auto it = runs[1].find(name);
    if (it == runs[1].end() || it->second != bytes) differ.push_back(name);
  }
  if (runs[0].size() != runs[1].size()) differ.push_back("(file sets differ)");
  std::string detail = fmt("%zu commands, %zu files compared, %zu differ", commands.size(), runs[0].size(),
                           differ.size());
  for (const auto& d : differ) detail += "\n    differs: " + d;
  return {differ.empty() && runs[0].size() > commands.size(), detail};
}

}  // namespace

int main(int argc, char** argv) {
#ifdef __GLIBC__
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
  CLI::App app{"acceptance suite"};
  std::string pira;
  std::string work = (fs::temp_directory_path() / "pira_acceptance").string();
  std::vector<int> only;
  app.add_option("--pira", pira, "path of the pira executable");
  app.add_option("--work", work, "scratch directory; the sweep tables are written under it");
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    std::string name;
    double limit_s;   // 0: no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "M/M/1 terms", 10, mm1_terms},
      {2, "constraint audit equivalence", 60, audit_equivalence},
      {3, "energy accounting", 0, energy_accounting},
      {4, "oracle exactness", 900, oracle_exactness},
      {5, "gradient checks", 120, gradient_checks},
      {6, "double dueling mechanics", 0, d3ql_mechanics},
      {7, "reward contract", 0, reward_contract},
      {8, "desk sweep ordering", 3600, [&] { return desk_sweep((fs::path(work) / "sweep").string()); }},
      {9, "CLI determinism", 0, [&] { return cli_determinism(pira, fs::path(work) / "cli"); }},
  };

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.1fs", secs);
    if (c.limit_s > 0) {
      timing += fmt(" of %.0fs", c.limit_s);
      if (secs >= c.limit_s) {
        o.pass = false;
        o.detail += "; over the time limit";
      }
    }
    const std::string line = fmt("%s %d %s [%s]: ", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), timing.c_str()) +
                             o.detail + "\n";
    std::fputs(line.c_str(), stdout);
    std::fflush(stdout);
    std::error_code ec;
    fs::create_directories(work, ec);
    std::ofstream(fs::path(work) / ("criterion_" + std::to_string(c.id) + ".txt")) << line;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
