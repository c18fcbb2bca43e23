#include "pira/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "pira/audit.hpp"

namespace pira {

using nlohmann::json;

AgentConfig sweep_agent_defaults() {
  AgentConfig a;
  a.batch_size = 16;
  a.architecture.width = 32;
  a.architecture.head_width = 32;
  return a;
}

void ExperimentPlan::validate() const {
  if (node_counts.empty() || request_totals.empty() || methods.empty())
    throw ConfigError("plan: grid and methods must not be empty");
  for (int v : node_counts)
    if (v < 1) throw ConfigError("plan: node counts must be positive");
  for (int r : request_totals)
    if (r < 0) throw ConfigError("plan: request totals must be non-negative");
  for (const auto& m : methods)
    if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
      throw ConfigError("plan: unknown method '" + m + "'");
  if (seeds < 1) throw ConfigError("plan: seeds must be positive");
  if (workers < 1) throw ConfigError("plan: workers must be positive");
  agent.validate();
}

json plan_to_json(const ExperimentPlan& p) {
  return {{"node_counts", p.node_counts},
          {"request_totals", p.request_totals},
          {"methods", p.methods},
          {"seeds", p.seeds},
          {"base_seed", p.base_seed},
          {"scenario", desk_config_to_json(p.scenario)},
          {"agent", agent_config_to_json(p.agent)},
          {"oracle_bounds",
           {{"max_requests_per_slot", p.bounds.max_requests_per_slot},
            {"max_nodes", p.bounds.max_nodes},
            {"max_actions", p.bounds.max_actions}}},
          {"workers", p.workers},
          {"output_dir", p.output_dir}};
}

ExperimentPlan plan_from_json(const json& doc) {
  ExperimentPlan p;
  try {
    p.node_counts = doc.value("node_counts", p.node_counts);
    p.request_totals = doc.value("request_totals", p.request_totals);
    p.methods = doc.value("methods", p.methods);
    p.seeds = doc.value("seeds", p.seeds);
    p.base_seed = doc.value("base_seed", p.base_seed);
    if (doc.contains("scenario")) p.scenario = desk_config_from_json(doc.at("scenario"));
    if (doc.contains("agent")) p.agent = agent_config_from_json(doc.at("agent"), p.agent);
    if (doc.contains("oracle_bounds")) {
      const auto& b = doc.at("oracle_bounds");
      p.bounds.max_requests_per_slot = b.value("max_requests_per_slot", p.bounds.max_requests_per_slot);
      p.bounds.max_nodes = b.value("max_nodes", p.bounds.max_nodes);
      p.bounds.max_actions = b.value("max_actions", p.bounds.max_actions);
    }
    p.workers = doc.value("workers", p.workers);
    p.output_dir = doc.value("output_dir", p.output_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }
  p.validate();
  return p;
}

namespace {

std::uint64_t method_seed(std::uint64_t seed, const std::string& method) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : method) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  return seed * 0x9E3779B97F4A7C15ULL ^ h;
}

bool trace_passes_audit(const Scenario& s, const Trace& trace) {
  for (const auto& slot : trace.slots)
    if (!audit_slot(s.topology, s.catalog, slot.accepted, AuditScope::Full, s.latency).feasible()) return false;
  return true;
}

}  // namespace

MetricsRow run_method(const Scenario& s, const std::string& method, const AgentConfig& agent_base,
                      const OracleBounds& bounds, std::uint64_t seed) {
  MetricsRow row;
  row.method = method;
  row.devices = s.topology.device_count();
  row.nodes = s.topology.node_count();
  row.requests = s.workload.request_count();
  row.seed = seed;

  AgentConfig agent = agent_base;
  agent.alpha = s.alpha;
  agent.latency = s.latency;
  const std::uint64_t mseed = method_seed(seed, method);

  Trace trace;
  RunMetrics m;
  try {
    if (method == "oracle") {
      auto sol = solve_horizon(s.topology, s.catalog, s.workload, s.alpha, s.latency, bounds);
      trace = std::move(sol.trace);
      m = evaluate_trace(s.topology, trace, s.alpha, row.requests);
    } else if (method == "orient") {
      auto res = run_training(s.topology, s.catalog, s.workload, agent, mseed);
      trace = std::move(res.evaluation.trace);
      m = res.evaluation.metrics;
    } else if (method == "flat") {
      auto res = baseline_flat_d3ql(s.topology, s.catalog, s.workload, agent, mseed);
      trace = std::move(res.evaluation.trace);
      m = res.evaluation.metrics;
    } else if (method == "rnd") {
      auto res = baseline_rnd(s.topology, s.catalog, s.workload, s.alpha, mseed, s.latency);
      trace = std::move(res.trace);
      m = res.metrics;
    } else {
      throw ConfigError("unknown method '" + method + "'");
    }
  } catch (const SizeLimitExceeded&) {
    row.status = "skipped";
    return row;
  }
  if (!trace_passes_audit(s, trace)) {
    row.status = "failed";
    return row;
  }
  row.total_profit = m.total_profit;
  row.total_energy = m.total_energy;
  row.objective = m.objective;
  row.mean_energy_per_supported = m.mean_energy_per_supported;
  row.supported = m.supported;
  return row;
}

std::vector<AggregateRow> aggregate(const std::vector<MetricsRow>& rows) {
  std::vector<AggregateRow> out;
  std::vector<std::vector<const MetricsRow*>> members;
  for (const auto& r : rows) {
    std::size_t g = 0;
    for (; g < out.size(); ++g)
      if (out[g].method == r.method && out[g].devices == r.devices && out[g].nodes == r.nodes &&
          out[g].requests == r.requests)
        break;
    if (g == out.size()) {
      AggregateRow a;
      a.method = r.method;
      a.devices = r.devices;
      a.nodes = r.nodes;
      a.requests = r.requests;
      out.push_back(a);
      members.emplace_back();
    }
    if (r.status == "ok") members[g].push_back(&r);
  }
  auto stats = [](const std::vector<const MetricsRow*>& ms, double MetricsRow::*f, double& mean, double& sd) {
    mean = sd = 0.0;
    if (ms.empty()) return;
    for (const auto* m : ms) mean += m->*f;
    mean /= static_cast<double>(ms.size());
    if (ms.size() < 2) return;
    for (const auto* m : ms) sd += (m->*f - mean) * (m->*f - mean);
    sd = std::sqrt(sd / static_cast<double>(ms.size() - 1));
  };
  for (std::size_t g = 0; g < out.size(); ++g) {
    auto& a = out[g];
    const auto& ms = members[g];
    a.runs = static_cast<int>(ms.size());
    stats(ms, &MetricsRow::objective, a.objective_mean, a.objective_std);
    stats(ms, &MetricsRow::total_profit, a.profit_mean, a.profit_std);
    stats(ms, &MetricsRow::total_energy, a.energy_mean, a.energy_std);
    stats(ms, &MetricsRow::mean_energy_per_supported, a.energy_per_supported_mean, a.energy_per_supported_std);
    for (const auto* m : ms) a.supported_mean += m->supported;
    if (!ms.empty()) a.supported_mean /= static_cast<double>(ms.size());
  }
  return out;
}

MetricsTable run_experiment(const ExperimentPlan& plan, const ProgressFn& progress) {
  plan.validate();
  struct Job {
    int nodes, requests, seed_index;
    std::string method;
  };
  std::vector<Job> jobs;
  for (int v : plan.node_counts)
    for (int r : plan.request_totals)
      for (int s = 0; s < plan.seeds; ++s)
        for (const auto& m : plan.methods) jobs.push_back({v, r, s, m});

  MetricsTable table;
  table.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex report;

  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const auto& job = jobs[j];
      const std::uint64_t seed = plan.base_seed + static_cast<std::uint64_t>(job.seed_index);
      char id[64];
      std::snprintf(id, sizeof id, "V%d_R%d_s%02d", job.nodes, job.requests, job.seed_index);
      MetricsRow row;
      try {
        DeskScenarioConfig cfg = plan.scenario;
        cfg.nodes = job.nodes;
        cfg.requests_total = job.requests;
        cfg.seed = seed;
        const Scenario s = make_desk_scenario(cfg);
        row = run_method(s, job.method, plan.agent, plan.bounds, seed);
      } catch (const std::exception& e) {
        row.method = job.method;
        row.nodes = job.nodes;
        row.requests = job.requests;
        row.seed = seed;
        row.status = "failed";
        std::lock_guard lock(report);
        std::fprintf(stderr, "run %s/%s failed: %s\n", id, job.method.c_str(), e.what());
      }
      row.run_id = id;
      table.rows[j] = row;
      if (progress) {
        std::lock_guard lock(report);
        progress(row);
      }
    }
  };

  if (plan.workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < plan.workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  table.aggregates = aggregate(table.rows);
  return table;
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

constexpr const char* kMetricsHeader =
    "run_id,method,N,V,R,total_profit,total_energy,OF,mean_energy_per_supported_request,seed,supported,status";
constexpr const char* kAggregateHeader =
    "method,N,V,R,runs,OF_mean,OF_std,total_profit_mean,total_profit_std,total_energy_mean,total_energy_std,"
    "mean_energy_per_supported_request_mean,mean_energy_per_supported_request_std,supported_mean";

template <class Row, class Parse>
std::vector<Row> read_rows(std::istream& in, const char* header, std::size_t fields, Parse parse) {
  std::string line;
  if (!std::getline(in, line) || line != header) throw ConfigError("unexpected CSV header");
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != fields) throw ConfigError("CSV row has " + std::to_string(f.size()) + " fields: " + line);
    try {
      rows.push_back(parse(f));
    } catch (const std::logic_error& e) {
      throw ConfigError("malformed CSV row: " + line);
    }
  }
  return rows;
}

}  // namespace

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kMetricsHeader << '\n';
  for (const auto& r : rows)
    out << r.run_id << ',' << r.method << ',' << r.devices << ',' << r.nodes << ',' << r.requests << ','
        << fmt(r.total_profit) << ',' << fmt(r.total_energy) << ',' << fmt(r.objective) << ','
        << fmt(r.mean_energy_per_supported) << ',' << r.seed << ',' << r.supported << ',' << r.status << '\n';
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  return read_rows<MetricsRow>(in, kMetricsHeader, 12, [](const std::vector<std::string>& f) {
    MetricsRow r;
    r.run_id = f[0];
    r.method = f[1];
    r.devices = std::stoi(f[2]);
    r.nodes = std::stoi(f[3]);
    r.requests = std::stoi(f[4]);
    r.total_profit = std::stod(f[5]);
    r.total_energy = std::stod(f[6]);
    r.objective = std::stod(f[7]);
    r.mean_energy_per_supported = std::stod(f[8]);
    r.seed = std::stoull(f[9]);
    r.supported = std::stoi(f[10]);
    r.status = f[11];
    return r;
  });
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kAggregateHeader << '\n';
  for (const auto& a : rows)
    out << a.method << ',' << a.devices << ',' << a.nodes << ',' << a.requests << ',' << a.runs << ','
        << fmt(a.objective_mean) << ',' << fmt(a.objective_std) << ',' << fmt(a.profit_mean) << ','
        << fmt(a.profit_std) << ',' << fmt(a.energy_mean) << ',' << fmt(a.energy_std) << ','
        << fmt(a.energy_per_supported_mean) << ',' << fmt(a.energy_per_supported_std) << ','
        << fmt(a.supported_mean) << '\n';
}

std::vector<AggregateRow> read_aggregate_csv(std::istream& in) {
  return read_rows<AggregateRow>(in, kAggregateHeader, 14, [](const std::vector<std::string>& f) {
    AggregateRow a;
    a.method = f[0];
    a.devices = std::stoi(f[1]);
    a.nodes = std::stoi(f[2]);
    a.requests = std::stoi(f[3]);
    a.runs = std::stoi(f[4]);
    a.objective_mean = std::stod(f[5]);
    a.objective_std = std::stod(f[6]);
    a.profit_mean = std::stod(f[7]);
    a.profit_std = std::stod(f[8]);
    a.energy_mean = std::stod(f[9]);
    a.energy_std = std::stod(f[10]);
    a.energy_per_supported_mean = std::stod(f[11]);
    a.energy_per_supported_std = std::stod(f[12]);
    a.supported_mean = std::stod(f[13]);
    return a;
  });
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir + "': " + ec.message());
}

}  // namespace

void export_table(const MetricsTable& table, const std::string& dir) {
  ensure_dir(dir);
  auto m = open_out(std::filesystem::path(dir) / "metrics.csv");
  write_metrics_csv(m, table.rows);
  auto s = open_out(std::filesystem::path(dir) / "summary.csv");
  write_aggregate_csv(s, table.aggregates);
  if (!m || !s) throw Error("writing metrics into '" + dir + "' failed");
}

namespace {

struct Series {
  std::string method;
  std::vector<double> x, mean, sd;
};

const char* color_of(const std::string& method) {
  if (method == "oracle") return "#222222";
  if (method == "orient") return "#1f77b4";
  if (method == "flat") return "#ff7f0e";
  if (method == "rnd") return "#2ca02c";
  return "#9467bd";
}

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<Series>& series) {
  const double W = 640, H = 420, L = 80, R = 150, T = 40, B = 60;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series)
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      xmin = std::min(xmin, s.x[j]);
      xmax = std::max(xmax, s.x[j]);
      ymin = std::min(ymin, s.mean[j] - s.sd[j]);
      ymax = std::max(ymax, s.mean[j] + s.sd[j]);
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmin -= 1, xmax += 1;
  if (ymax == ymin) ymin -= 1, ymax += 1;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

  std::ostringstream o;
  o.precision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int j = 0; j <= 4; ++j) {
    const double y = ymin + (ymax - ymin) * j / 4.0;
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << y << "</text>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << py(y) << "\" x2=\"" << W - R << "\" y2=\"" << py(y)
      << "\" stroke=\"#dddddd\"/>\n";
  }
  std::vector<double> ticks;
  for (const auto& s : series) ticks.insert(ticks.end(), s.x.begin(), s.x.end());
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
  for (double x : ticks)
    o << "<text x=\"" << px(x) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << x << "</text>\n";
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  o << "<text transform=\"translate(18," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel
    << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* c = color_of(s.method);
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
    for (std::size_t j = 0; j < s.x.size(); ++j) o << px(s.x[j]) << ',' << py(s.mean[j]) << ' ';
    o << "\"/>\n";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      o << "<line x1=\"" << px(s.x[j]) << "\" y1=\"" << py(s.mean[j] - s.sd[j]) << "\" x2=\"" << px(s.x[j])
        << "\" y2=\"" << py(s.mean[j] + s.sd[j]) << "\" stroke=\"" << c << "\"/>\n";
      o << "<circle cx=\"" << px(s.x[j]) << "\" cy=\"" << py(s.mean[j]) << "\" r=\"3\" fill=\"" << c << "\"/>\n";
    }
    const double ly = T + 20 + 20 * static_cast<double>(k);
    o << "<line x1=\"" << W - R + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 40 << "\" y2=\"" << ly
      << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - R + 46 << "\" y=\"" << ly + 4 << "\">" << s.method << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace

std::vector<std::string> write_plots(const std::vector<AggregateRow>& agg, const std::string& dir) {
  ensure_dir(dir);
  struct Metric {
    const char* name;
    double AggregateRow::*mean;
    double AggregateRow::*sd;
  };
  const Metric metrics[] = {
      {"OF", &AggregateRow::objective_mean, &AggregateRow::objective_std},
      {"total_profit", &AggregateRow::profit_mean, &AggregateRow::profit_std},
      {"total_energy", &AggregateRow::energy_mean, &AggregateRow::energy_std},
      {"mean_energy_per_supported_request", &AggregateRow::energy_per_supported_mean,
       &AggregateRow::energy_per_supported_std},
  };
  std::vector<std::string> written;
  if (agg.empty()) return written;
  int vmax = 0, rmax = 0;
  std::vector<std::string> methods;
  for (const auto& a : agg) {
    vmax = std::max(vmax, a.nodes);
    rmax = std::max(rmax, a.requests);
    if (std::find(methods.begin(), methods.end(), a.method) == methods.end()) methods.push_back(a.method);
  }
  for (const auto& m : metrics) {
    for (int axis = 0; axis < 2; ++axis) {
      std::vector<Series> series;
      for (const auto& method : methods) {
        Series s{method, {}, {}, {}};
        std::vector<const AggregateRow*> pts;
        for (const auto& a : agg)
          if (a.method == method && a.runs > 0 && (axis == 0 ? a.requests == rmax : a.nodes == vmax)) pts.push_back(&a);
        std::sort(pts.begin(), pts.end(), [&](const AggregateRow* x, const AggregateRow* y) {
          return axis == 0 ? x->nodes < y->nodes : x->requests < y->requests;
        });
        for (const auto* a : pts) {
          s.x.push_back(axis == 0 ? a->nodes : a->requests);
          s.mean.push_back(a->*m.mean);
          s.sd.push_back(a->*m.sd);
        }
        if (!s.x.empty()) series.push_back(std::move(s));
      }
      const std::string suffix = axis == 0 ? "_vs_V" : "_vs_R";
      const std::string title = axis == 0 ? std::string(m.name) + " vs compute nodes (R = " + std::to_string(rmax) + ")"
                                          : std::string(m.name) + " vs requests (V = " + std::to_string(vmax) + ")";
      const auto path = std::filesystem::path(dir) / (std::string(m.name) + suffix + ".svg");
      auto out = open_out(path);
      out << svg_plot(title, axis == 0 ? "compute nodes V" : "requests R", m.name, series);
      if (!out) throw Error("writing '" + path.string() + "' failed");
      written.push_back(path.string());
    }
  }
  return written;
}

}  // namespace pira
