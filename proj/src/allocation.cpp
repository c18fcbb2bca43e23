#include "pira/allocation.hpp"

#include <algorithm>
#include <sstream>

#include "pira/common.hpp"

namespace pira {

ActionSpace::ActionSpace(int instances, int nodes, int paths, int priorities)
    : instances_(instances), nodes_(nodes), paths_(paths), priorities_(priorities) {
  if (instances < 0 || nodes < 0 || paths < 0 || priorities < 0)
    throw std::invalid_argument("action space dimensions must be non-negative");
}

ActionSpace::ActionSpace(const Topology& topology, const ServiceCatalog& catalog)
    : ActionSpace(catalog.instance_count(), topology.node_count(), topology.path_count(),
                  topology.priority_levels) {}

Action ActionSpace::action(int index) const {
  if (index < 0 || index >= size()) throw std::out_of_range("action index out of range");
  Action a;
  a.priority = index % priorities_;
  index /= priorities_;
  a.path = index % paths_;
  index /= paths_;
  a.node = index % nodes_;
  a.instance = index / nodes_;
  return a;
}

bool ActionSpace::contains(const Action& a) const {
  return a.instance >= 0 && a.instance < instances_ && a.node >= 0 && a.node < nodes_ &&
         a.path >= 0 && a.path < paths_ && a.priority >= 0 && a.priority < priorities_;
}

std::string to_string(Constraint c) { return "C" + std::to_string(static_cast<int>(c)); }

std::string join_constraints(const std::vector<Constraint>& cs) {
  std::string out;
  for (std::size_t j = 0; j < cs.size(); ++j) {
    if (j) out += ';';
    out += to_string(cs[j]);
  }
  return out;
}

AllocationState::AllocationState(const Topology& topology, const ServiceCatalog& catalog, int slot)
    : topology_(&topology),
      catalog_(&catalog),
      slot_(slot),
      levels_(topology.priority_levels),
      instance_host_(catalog.instance_count(), -1),
      instance_requests_(catalog.instance_count(), 0),
      instance_load_(catalog.instance_count(), 0.0),
      node_instances_(topology.node_count(), 0),
      node_hosted_capacity_(topology.node_count(), 0.0),
      node_load_(topology.node_count() * levels_, 0.0),
      device_load_(topology.device_count() * levels_, 0.0),
      link_load_(topology.link_count() * levels_, 0.0),
      device_total_(topology.device_count(), 0.0),
      link_total_(topology.link_count(), 0.0),
      history_{std::vector<std::uint8_t>(topology.node_count(), 0)} {}

std::optional<Action> AllocationState::assignment_of(int request_id) const {
  for (const auto& a : assignments_)
    if (a.request.id == request_id) return a.action;
  return std::nullopt;
}

std::optional<int> AllocationState::instance_host(int i) const {
  if (instance_host_[i] < 0) return std::nullopt;
  return instance_host_[i];
}

std::vector<std::uint8_t> AllocationState::activation() const {
  std::vector<std::uint8_t> g(node_instances_.size());
  for (std::size_t v = 0; v < g.size(); ++v) g[v] = node_instances_[v] > 0 ? 1 : 0;
  return g;
}

double AllocationState::node_residual(int v, int k) const {
  return topology_->nodes[v].priority_capacity[k] - node_load(v, k);
}

double AllocationState::device_residual(int n, int k) const {
  return topology_->devices[n].priority_bandwidth[k] - device_load(n, k);
}

double AllocationState::link_residual(int l, int k) const {
  return topology_->links[l].priority_bandwidth[k] - link_load(l, k);
}

Verdict AllocationState::check(const Request& request, const Action& action) const {
  if (request.arrival_slot != slot_)
    throw Error("request " + std::to_string(request.id) + " belongs to slot " +
                std::to_string(request.arrival_slot) + ", ledger is at slot " + std::to_string(slot_));
  const ActionSpace space(*topology_, *catalog_);
  if (!space.contains(action)) throw std::out_of_range("action indices outside the action space");

  const auto& inst = catalog_->instances[action.instance];
  const auto& node = topology_->nodes[action.node];
  const auto& path = topology_->paths[action.path];
  const int k = action.priority;
  Verdict v;
  auto flag = [&v](Constraint c) { v.violated.push_back(c); };

  if (inst.service != request.service || assignment_of(request.id).has_value()) flag(Constraint::C1);
  const int host = instance_host_[action.instance];
  if (host >= 0 && host != action.node) flag(Constraint::C3);
  if (instance_load_[action.instance] + request.min_capacity > inst.capacity) flag(Constraint::C5);
  if (host < 0 && node_hosted_capacity_[action.node] + inst.capacity > node.total_capacity)
    flag(Constraint::C6);
  if (path.endpoint_device != request.poa || !path.visits_device(node.device)) flag(Constraint::C7);

  bool c8 = false, c9 = false, c12 = false, c13 = false;
  for (const auto& [l, count] : path.link_visits) {
    const double add = request.min_bandwidth * count;
    if (link_total_[l] + add > topology_->links[l].total_bandwidth) c8 = true;
    if (link_load(l, k) + add >= topology_->links[l].priority_bandwidth[k]) c12 = true;
  }
  for (const auto& [n, count] : path.device_visits) {
    const double add = request.min_bandwidth * count;
    if (device_total_[n] + add > topology_->devices[n].total_bandwidth) c9 = true;
    if (device_load(n, k) + add >= topology_->devices[n].priority_bandwidth[k]) c13 = true;
  }
  if (c8) flag(Constraint::C8);
  if (c9) flag(Constraint::C9);
  if (node_load(action.node, k) + request.min_capacity >= node.priority_capacity[k])
    flag(Constraint::C11);
  if (c12) flag(Constraint::C12);
  if (c13) flag(Constraint::C13);
  return v;
}

void AllocationState::apply(const Request& request, const Action& action) {
  const Verdict v = check(request, action);
  if (!v.feasible())
    throw InfeasibleAction("request " + std::to_string(request.id) +
                           " cannot take this action: " + join_constraints(v.violated));
  const int i = action.instance;
  const int k = action.priority;
  if (instance_host_[i] < 0) {
    instance_host_[i] = action.node;
    ++node_instances_[action.node];
    node_hosted_capacity_[action.node] += catalog_->instances[i].capacity;
  }
  ++instance_requests_[i];
  instance_load_[i] += request.min_capacity;
  node_load_[action.node * levels_ + k] += request.min_capacity;
  const auto& path = topology_->paths[action.path];
  for (const auto& [l, count] : path.link_visits) {
    link_load_[l * levels_ + k] += request.min_bandwidth * count;
    link_total_[l] += request.min_bandwidth * count;
  }
  for (const auto& [n, count] : path.device_visits) {
    device_load_[n * levels_ + k] += request.min_bandwidth * count;
    device_total_[n] += request.min_bandwidth * count;
  }
  assignments_.push_back({request, action});
}

AllocationState AllocationState::advance() const {
  AllocationState next(*topology_, *catalog_, slot_ + 1);
  next.history_ = history_;
  next.history_.push_back(activation());
  return next;
}

void write_allocation_trace(std::ostream& out, const std::vector<DecisionRecord>& rows) {
  out << "t,r,i,v,p,k,accepted,violated_constraints\n";
  for (const auto& row : rows) {
    out << row.slot << ',' << row.request << ',';
    if (row.action)
      out << row.action->instance << ',' << row.action->node << ',' << row.action->path << ','
          << row.action->priority;
    else
      out << ",,,";
    out << ',' << (row.accepted ? 1 : 0) << ',' << join_constraints(row.violated) << '\n';
  }
}

std::vector<DecisionRecord> read_allocation_trace(std::istream& in) {
  std::vector<DecisionRecord> rows;
  std::string line;
  std::getline(in, line);   // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (cells.size() != 8) throw ConfigError("allocation trace: malformed row '" + line + "'");
    DecisionRecord r;
    r.slot = std::stoi(cells[0]);
    r.request = std::stoi(cells[1]);
    if (!cells[2].empty())
      r.action = Action{std::stoi(cells[2]), std::stoi(cells[3]), std::stoi(cells[4]), std::stoi(cells[5])};
    r.accepted = cells[6] == "1";
    std::stringstream vs(cells[7]);
    while (std::getline(vs, cell, ';'))
      if (!cell.empty()) r.violated.push_back(static_cast<Constraint>(std::stoi(cell.substr(1))));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace pira
