#include "pira/qfunction.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace pira {

namespace detail {

using Batch = std::vector<const StateFeatures*>;

struct Cache {
  virtual ~Cache() = default;
};

/// Value and advantage heads evaluated on a batch of states at once:
/// values has one entry per state, adv one row per state.
class Network {
 public:
  virtual ~Network() = default;
  virtual std::unique_ptr<Network> clone() const = 0;
  virtual std::unique_ptr<Cache> forward(const Batch& batch, Eigen::VectorXd& values, Eigen::MatrixXd& adv) const = 0;
  virtual void backward(const Batch& batch, const Cache& cache, const Eigen::VectorXd& dvalues,
                        const Eigen::MatrixXd& dadv) = 0;
  virtual void visit(const std::function<void(nn::Param&)>& fn) = 0;

  void inspect(const std::function<void(const nn::Param&)>& fn) const {
    const_cast<Network*>(this)->visit([&](nn::Param& p) { fn(p); });
  }
};

namespace {

Eigen::MatrixXd stack(const Batch& batch, Eigen::MatrixXd StateFeatures::*field) {
  const Eigen::Index rows = (batch.front()->*field).rows(), cols = (batch.front()->*field).cols();
  Eigen::MatrixXd out(rows * static_cast<Eigen::Index>(batch.size()), cols);
  for (std::size_t b = 0; b < batch.size(); ++b) out.middleRows(static_cast<Eigen::Index>(b) * rows, rows) = batch[b]->*field;
  return out;
}

/// Pairwise bits of every (instance, node, path) triple, rows ordered like
/// the action space with the priority index stripped, one block per state.
Eigen::MatrixXd pair_features(const Batch& batch) {
  const auto& f0 = *batch.front();
  const int I = static_cast<int>(f0.instances.rows());
  const int V = static_cast<int>(f0.nodes.rows());
  const int P = static_cast<int>(f0.paths.rows());
  Eigen::MatrixXd z(static_cast<Eigen::Index>(batch.size()) * I * V * P, kPairFeatureWidth);
  Eigen::Index q = 0;
  for (const auto* fp : batch) {
    const auto& f = *fp;
    for (int i = 0; i < I; ++i) {
      const double hosted = f.instance_host.row(i).sum();
      for (int v = 0; v < V; ++v)
        for (int p = 0; p < P; ++p, ++q) {
          z(q, 0) = f.path_serves[p];
          z(q, 1) = f.path_reach(p, v);
          z(q, 2) = f.instances(i, 0);
          z(q, 3) = f.instances(i, 1);
          z(q, 4) = f.instances(i, 2);
          z(q, 5) = f.instance_host(i, v);
          z(q, 6) = hosted - f.instance_host(i, v);
        }
    }
  }
  return z;
}

Eigen::MatrixXd block_means(const Eigen::MatrixXd& x, Eigen::Index blocks) {
  const Eigen::Index n = x.rows() / blocks;
  Eigen::MatrixXd out(blocks, x.cols());
  for (Eigen::Index b = 0; b < blocks; ++b) out.row(b) = x.middleRows(b * n, n).colwise().mean();
  return out;
}

class GraphNet final : public Network {
 public:
  struct State : Cache {
    std::vector<const Eigen::MatrixXd*> adjacency;
    Eigen::MatrixXd Xv, Xp, Xi;
    Eigen::MatrixXd node_pre;
    std::vector<nn::MessagePassing::Cache> rounds;
    Eigen::MatrixXd H, path_pre, E, inst_pre, G;
    Eigen::MatrixXd readout, value_pre, value_hidden;
    Eigen::MatrixXd Z, pair_pre, pair_hidden;
  };

  GraphNet(const FeatureShape& s, const Architecture& a, Rng& rng)
      : shape_(s),
        node_in_(s.node_width(), a.width, rng),
        path_in_(s.path_width(), a.width, rng),
        inst_in_(FeatureShape::instance_width(), a.width, rng),
        value1_(2 * a.width, a.head_width, rng),
        value2_(a.head_width, 1, rng),
        adv_node_(a.width, a.head_width, rng),
        adv_path_(a.width, a.head_width, rng),
        adv_inst_(a.width, a.head_width, rng),
        adv_node_raw_(s.node_width(), a.head_width, rng),
        adv_path_raw_(s.path_width(), a.head_width, rng),
        adv_pair_(kPairFeatureWidth, a.head_width, rng),
        adv_out_(a.head_width, s.levels, rng) {
    for (int r = 0; r < a.rounds; ++r) rounds_.emplace_back(a.width, rng);
  }

  std::unique_ptr<Network> clone() const override { return std::make_unique<GraphNet>(*this); }

  void visit(const std::function<void(nn::Param&)>& fn) override {
    node_in_.visit(fn);
    for (auto& r : rounds_) r.visit(fn);
    path_in_.visit(fn);
    inst_in_.visit(fn);
    value1_.visit(fn);
    value2_.visit(fn);
    adv_node_.visit(fn);
    adv_path_.visit(fn);
    adv_inst_.visit(fn);
    adv_node_raw_.visit(fn);
    adv_path_raw_.visit(fn);
    adv_pair_.visit(fn);
    adv_out_.visit(fn);
  }

  std::unique_ptr<Cache> forward(const Batch& batch, Eigen::VectorXd& values, Eigen::MatrixXd& adv) const override {
    auto c = std::make_unique<State>();
    const Eigen::Index B = static_cast<Eigen::Index>(batch.size());
    const int V = shape_.nodes, P = shape_.paths, I = shape_.instances, K = shape_.levels;
    for (const auto* f : batch) c->adjacency.push_back(&f->adjacency);
    c->Xv = stack(batch, &StateFeatures::nodes);
    c->Xp = stack(batch, &StateFeatures::paths);
    c->Xi = stack(batch, &StateFeatures::instances);

    c->node_pre = node_in_.forward(c->Xv);
    c->H = nn::relu(c->node_pre);
    c->rounds.resize(rounds_.size());
    for (std::size_t r = 0; r < rounds_.size(); ++r) c->H = rounds_[r].forward(c->H, c->adjacency, &c->rounds[r]);
    c->path_pre = path_in_.forward(c->Xp);
    c->E = nn::relu(c->path_pre);
    c->inst_pre = inst_in_.forward(c->Xi);
    c->G = nn::relu(c->inst_pre);

    const Eigen::Index W = c->H.cols();
    c->readout.resize(B, 2 * W);
    c->readout << block_means(c->H, B), block_means(c->E, B);
    c->value_pre = value1_.forward(c->readout);
    c->value_hidden = nn::relu(c->value_pre);
    values = value2_.forward(c->value_hidden).col(0);

    const Eigen::MatrixXd Nv = adv_node_.forward(c->H) + adv_node_raw_.forward(c->Xv);
    const Eigen::MatrixXd Pp = adv_path_.forward(c->E) + adv_path_raw_.forward(c->Xp);
    const Eigen::MatrixXd Ii = adv_inst_.forward(c->G);
    c->Z = pair_features(batch);
    c->pair_pre = adv_pair_.forward(c->Z);
    // Row-major scratch keeps the per-triple gather contiguous.
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMajor pre = c->pair_pre;
    const RowMajor nv = Nv, pp = Pp, ii = Ii;
    Eigen::Index q = 0;
    for (Eigen::Index b = 0; b < B; ++b)
      for (int i = 0; i < I; ++i)
        for (int v = 0; v < V; ++v)
          for (int p = 0; p < P; ++p, ++q)
            pre.row(q) += nv.row(b * V + v) + pp.row(b * P + p) + ii.row(b * I + i);
    c->pair_pre = pre;
    c->pair_hidden = nn::relu(c->pair_pre);
    const RowMajor out = adv_out_.forward(c->pair_hidden);   // (B*IVP) x K
    adv = Eigen::Map<const RowMajor>(out.data(), B, static_cast<Eigen::Index>(I) * V * P * K);
    return c;
  }

  void backward(const Batch& batch, const Cache& base, const Eigen::VectorXd& dvalues,
                const Eigen::MatrixXd& dadv) override {
    const auto& c = static_cast<const State&>(base);
    const Eigen::Index B = static_cast<Eigen::Index>(batch.size());
    const int V = shape_.nodes, P = shape_.paths, I = shape_.instances, K = shape_.levels;
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    const RowMajor dadv_rm = dadv;
    const Eigen::MatrixXd dout = Eigen::Map<const RowMajor>(dadv_rm.data(), c.pair_hidden.rows(), K);
    const Eigen::MatrixXd dhidden = adv_out_.backward(c.pair_hidden, dout);
    const Eigen::MatrixXd dpre = nn::relu_backward(c.pair_pre, dhidden);
    adv_pair_.backward(c.Z, dpre);

    const Eigen::Index Hh = dpre.cols();
    const RowMajor dpre_rm = dpre;
    RowMajor dNv = RowMajor::Zero(B * V, Hh), dPp = RowMajor::Zero(B * P, Hh), dIi = RowMajor::Zero(B * I, Hh);
    Eigen::Index q = 0;
    for (Eigen::Index b = 0; b < B; ++b)
      for (int i = 0; i < I; ++i)
        for (int v = 0; v < V; ++v)
          for (int p = 0; p < P; ++p, ++q) {
            dNv.row(b * V + v) += dpre_rm.row(q);
            dPp.row(b * P + p) += dpre_rm.row(q);
            dIi.row(b * I + i) += dpre_rm.row(q);
          }
    const Eigen::MatrixXd dNv_c = dNv, dPp_c = dPp, dIi_c = dIi;
    Eigen::MatrixXd dH = adv_node_.backward(c.H, dNv_c);
    Eigen::MatrixXd dE = adv_path_.backward(c.E, dPp_c);
    adv_node_raw_.backward(c.Xv, dNv_c);
    adv_path_raw_.backward(c.Xp, dPp_c);
    const Eigen::MatrixXd dG = adv_inst_.backward(c.G, dIi_c);

    const Eigen::MatrixXd dvh = value2_.backward(c.value_hidden, dvalues);
    const Eigen::MatrixXd dread = value1_.backward(c.readout, nn::relu_backward(c.value_pre, dvh));
    const Eigen::Index W = c.H.cols();
    for (Eigen::Index b = 0; b < B; ++b) {
      dH.middleRows(b * V, V).rowwise() += dread.row(b).leftCols(W) / static_cast<double>(V);
      dE.middleRows(b * P, P).rowwise() += dread.row(b).rightCols(W) / static_cast<double>(P);
    }

    inst_in_.backward(c.Xi, nn::relu_backward(c.inst_pre, dG));
    path_in_.backward(c.Xp, nn::relu_backward(c.path_pre, dE));
    for (std::size_t r = rounds_.size(); r-- > 0;) dH = rounds_[r].backward(c.rounds[r], c.adjacency, dH);
    node_in_.backward(c.Xv, nn::relu_backward(c.node_pre, dH));
  }

 private:
  FeatureShape shape_;
  nn::Dense node_in_, path_in_, inst_in_;
  std::vector<nn::MessagePassing> rounds_;
  nn::Dense value1_, value2_;
  nn::Dense adv_node_, adv_path_, adv_inst_, adv_node_raw_, adv_path_raw_, adv_pair_, adv_out_;
};

class FlatNet final : public Network {
 public:
  struct State : Cache {
    Eigen::MatrixXd x, pre1, h1, pre2, h2;
  };

  FlatNet(const FeatureShape& s, const Architecture& a, Rng& rng)
      : hidden1_(s.flat_width(), a.width, rng),
        hidden2_(a.width, a.head_width, rng),
        value_(a.head_width, 1, rng),
        adv_(a.head_width, s.action_count(), rng) {}

  std::unique_ptr<Network> clone() const override { return std::make_unique<FlatNet>(*this); }

  void visit(const std::function<void(nn::Param&)>& fn) override {
    hidden1_.visit(fn);
    hidden2_.visit(fn);
    value_.visit(fn);
    adv_.visit(fn);
  }

  std::unique_ptr<Cache> forward(const Batch& batch, Eigen::VectorXd& values, Eigen::MatrixXd& adv) const override {
    auto c = std::make_unique<State>();
    c->x.resize(static_cast<Eigen::Index>(batch.size()), hidden1_.weight.value.cols());
    for (std::size_t b = 0; b < batch.size(); ++b) c->x.row(static_cast<Eigen::Index>(b)) = batch[b]->flatten().transpose();
    c->pre1 = hidden1_.forward(c->x);
    c->h1 = nn::relu(c->pre1);
    c->pre2 = hidden2_.forward(c->h1);
    c->h2 = nn::relu(c->pre2);
    values = value_.forward(c->h2).col(0);
    adv = adv_.forward(c->h2);
    return c;
  }

  void backward(const Batch&, const Cache& base, const Eigen::VectorXd& dvalues,
                const Eigen::MatrixXd& dadv) override {
    const auto& c = static_cast<const State&>(base);
    Eigen::MatrixXd dh2 = value_.backward(c.h2, dvalues);
    dh2 += adv_.backward(c.h2, dadv);
    const Eigen::MatrixXd dh1 = hidden2_.backward(c.h1, nn::relu_backward(c.pre2, dh2));
    hidden1_.backward(c.x, nn::relu_backward(c.pre1, dh1));
  }

 private:
  nn::Dense hidden1_, hidden2_, value_, adv_;
};

}  // namespace
}  // namespace detail

namespace {

void check_features(const FeatureShape& shape, const StateFeatures& f) {
  const bool ok = f.shape() == shape && f.path_reach.rows() == shape.paths && f.path_reach.cols() == shape.nodes &&
                  f.path_serves.size() == shape.paths && f.instance_host.rows() == shape.instances &&
                  f.instance_host.cols() == shape.nodes && f.adjacency.rows() == shape.nodes &&
                  f.adjacency.cols() == shape.nodes && f.instances.cols() == FeatureShape::instance_width();
  if (!ok) {
    const auto got = f.shape();
    std::ostringstream msg;
    msg << "feature shape (I=" << got.instances << ", V=" << got.nodes << ", P=" << got.paths << ", K=" << got.levels
        << ") does not match network (I=" << shape.instances << ", V=" << shape.nodes << ", P=" << shape.paths
        << ", K=" << shape.levels << ")";
    throw Error(msg.str());
  }
}

std::unique_ptr<detail::Network> make_network(const FeatureShape& shape, const Architecture& arch, Rng& rng) {
  if (shape.action_count() <= 0) throw ConfigError("empty action space");
  if (arch.width <= 0 || arch.head_width <= 0 || arch.rounds < 0) throw ConfigError("invalid architecture");
  if (arch.kind == Architecture::Kind::Flat) return std::make_unique<detail::FlatNet>(shape, arch, rng);
  return std::make_unique<detail::GraphNet>(shape, arch, rng);
}

Eigen::MatrixXd combine_rows(const Eigen::VectorXd& values, const Eigen::MatrixXd& adv, bool product) {
  Eigen::MatrixXd q(adv.rows(), adv.cols());
  for (Eigen::Index b = 0; b < adv.rows(); ++b)
    q.row(b) = nn::dueling_combine(values[b], adv.row(b).transpose(), product).transpose();
  return q;
}

}  // namespace

QFunction::QFunction(FeatureShape shape, Architecture arch, std::uint64_t seed, OptimizerConfig optimizer)
    : shape_(shape), arch_(arch), opt_(optimizer) {
  Rng rng(seed);
  net_ = make_network(shape_, arch_, rng);
}

QFunction::QFunction(const QFunction& o)
    : shape_(o.shape_), arch_(o.arch_), opt_(o.opt_), net_(o.net_->clone()), moment1_(o.moment1_),
      moment2_(o.moment2_), steps_(o.steps_) {}

QFunction& QFunction::operator=(const QFunction& o) {
  if (this != &o) {
    QFunction tmp(o);
    *this = std::move(tmp);
  }
  return *this;
}

QFunction::QFunction(QFunction&&) noexcept = default;
QFunction& QFunction::operator=(QFunction&&) noexcept = default;
QFunction::~QFunction() = default;

std::pair<double, Eigen::VectorXd> QFunction::heads(const StateFeatures& f) const {
  check_features(shape_, f);
  Eigen::VectorXd values;
  Eigen::MatrixXd adv;
  net_->forward({&f}, values, adv);
  return {values[0], adv.row(0).transpose()};
}

Eigen::VectorXd QFunction::q_values(const StateFeatures& f) const {
  const auto [value, adv] = heads(f);
  return nn::dueling_combine(value, adv, arch_.dueling_product);
}

Eigen::MatrixXd QFunction::q_values(const std::vector<const StateFeatures*>& batch) const {
  if (batch.empty()) return Eigen::MatrixXd(0, action_count());
  for (const auto* f : batch) check_features(shape_, *f);
  Eigen::VectorXd values;
  Eigen::MatrixXd adv;
  net_->forward(batch, values, adv);
  return combine_rows(values, adv, arch_.dueling_product);
}

double QFunction::loss(const std::vector<TrainSample>& batch) const {
  if (batch.empty()) return 0.0;
  std::vector<const StateFeatures*> states;
  for (const auto& s : batch) states.push_back(s.features);
  const Eigen::MatrixXd q = q_values(states);
  double total = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const double d = q(static_cast<Eigen::Index>(b), batch[b].action) - batch[b].target;
    total += 0.5 * d * d;
  }
  return total / static_cast<double>(batch.size());
}

double QFunction::loss_gradient(const std::vector<TrainSample>& batch, std::vector<double>& gradient) const {
  net_->visit([](nn::Param& p) { p.zero_grad(); });
  double total = 0.0;
  const double n = static_cast<double>(std::max<std::size_t>(batch.size(), 1));
  if (!batch.empty()) {
    std::vector<const StateFeatures*> states;
    for (const auto& s : batch) {
      check_features(shape_, *s.features);
      if (s.action < 0 || s.action >= action_count()) throw std::out_of_range("train sample action out of range");
      states.push_back(s.features);
    }
    Eigen::VectorXd values;
    Eigen::MatrixXd adv;
    const auto cache = net_->forward(states, values, adv);
    Eigen::VectorXd dvalues(values.size());
    Eigen::MatrixXd dadv(adv.rows(), adv.cols());
    for (Eigen::Index b = 0; b < adv.rows(); ++b) {
      const Eigen::VectorXd a = adv.row(b).transpose();
      const Eigen::VectorXd q = nn::dueling_combine(values[b], a, arch_.dueling_product);
      const auto& s = batch[static_cast<std::size_t>(b)];
      const double d = q[s.action] - s.target;
      total += 0.5 * d * d;
      Eigen::VectorXd dq = Eigen::VectorXd::Zero(q.size());
      dq[s.action] = d / n;
      Eigen::VectorXd da;
      dvalues[b] = nn::dueling_backward(values[b], a, dq, arch_.dueling_product, da);
      dadv.row(b) = da.transpose();
    }
    net_->backward(states, *cache, dvalues, dadv);
  }
  gradient.clear();
  gradient.reserve(parameter_count());
  net_->inspect([&](const nn::Param& p) {
    gradient.insert(gradient.end(), p.grad.data(), p.grad.data() + p.grad.size());
  });
  return total / n;
}

TrainResult QFunction::train_step(const std::vector<TrainSample>& batch, double sigma) {
  TrainResult res;
  std::vector<double> g;
  res.loss = loss_gradient(batch, g);
  for (double x : g)
    if (!std::isfinite(x)) return res;
  if (!std::isfinite(res.loss)) return res;

  if (opt_.clip_norm > 0.0) {
    double norm = 0.0;
    for (double x : g) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > opt_.clip_norm)
      for (double& x : g) x *= opt_.clip_norm / norm;
  }

  std::vector<double> w = parameters();
  if (opt_.kind == OptimizerConfig::Kind::Adam) {
    if (moment1_.size() != w.size()) {
      moment1_.assign(w.size(), 0.0);
      moment2_.assign(w.size(), 0.0);
    }
    ++steps_;
    const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(steps_));
    for (std::size_t j = 0; j < w.size(); ++j) {
      moment1_[j] = opt_.beta1 * moment1_[j] + (1.0 - opt_.beta1) * g[j];
      moment2_[j] = opt_.beta2 * moment2_[j] + (1.0 - opt_.beta2) * g[j] * g[j];
      w[j] -= sigma * (moment1_[j] / c1) / (std::sqrt(moment2_[j] / c2) + opt_.epsilon);
    }
  } else {
    ++steps_;
    for (std::size_t j = 0; j < w.size(); ++j) w[j] -= sigma * g[j];
  }
  set_parameters(w);
  res.applied = true;
  return res;
}

std::vector<double> QFunction::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  net_->inspect([&](const nn::Param& p) {
    out.insert(out.end(), p.value.data(), p.value.data() + p.value.size());
  });
  return out;
}

void QFunction::set_parameters(const std::vector<double>& values) {
  if (values.size() != parameter_count())
    throw Error("parameter vector has " + std::to_string(values.size()) + " entries, expected " +
                std::to_string(parameter_count()));
  std::size_t at = 0;
  net_->visit([&](nn::Param& p) {
    std::copy(values.begin() + static_cast<std::ptrdiff_t>(at),
              values.begin() + static_cast<std::ptrdiff_t>(at + p.value.size()), p.value.data());
    at += static_cast<std::size_t>(p.value.size());
  });
}

std::vector<std::pair<int, int>> QFunction::parameter_shapes() const {
  std::vector<std::pair<int, int>> out;
  net_->inspect([&](const nn::Param& p) {
    out.emplace_back(static_cast<int>(p.value.rows()), static_cast<int>(p.value.cols()));
  });
  return out;
}

std::size_t QFunction::parameter_count() const {
  std::size_t n = 0;
  net_->inspect([&](const nn::Param& p) { n += static_cast<std::size_t>(p.value.size()); });
  return n;
}

void QFunction::copy_weights_from(const QFunction& other) {
  if (other.shape_ != shape_ || other.arch_ != arch_) throw Error("copy_weights_from: layout mismatch");
  set_parameters(other.parameters());
}

bool QFunction::same_weights(const QFunction& other) const {
  return other.shape_ == shape_ && other.arch_ == arch_ && other.parameters() == parameters();
}

nlohmann::json architecture_to_json(const Architecture& a) {
  return {{"kind", a.kind == Architecture::Kind::Flat ? "flat" : "graph"},
          {"width", a.width},
          {"rounds", a.rounds},
          {"head_width", a.head_width},
          {"dueling_product", a.dueling_product}};
}

Architecture architecture_from_json(const nlohmann::json& doc, const Architecture& base) {
  Architecture a = base;
  const std::string kind = doc.value("kind", std::string(base.kind == Architecture::Kind::Flat ? "flat" : "graph"));
  if (kind == "flat")
    a.kind = Architecture::Kind::Flat;
  else if (kind == "graph")
    a.kind = Architecture::Kind::Graph;
  else
    throw ConfigError("unknown architecture kind '" + kind + "'");
  a.width = doc.value("width", a.width);
  a.rounds = doc.value("rounds", a.rounds);
  a.head_width = doc.value("head_width", a.head_width);
  a.dueling_product = doc.value("dueling_product", a.dueling_product);
  return a;
}

nlohmann::json QFunction::to_json() const {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& [r, c] : parameter_shapes()) layers.push_back({r, c});
  return {{"format", "pira-qfunction"},
          {"version", 1},
          {"shape",
           {{"instances", shape_.instances}, {"nodes", shape_.nodes}, {"paths", shape_.paths}, {"levels", shape_.levels}}},
          {"architecture", architecture_to_json(arch_)},
          {"layers", layers},
          {"parameters", parameters()}};
}

QFunction QFunction::from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "pira-qfunction" || doc.at("version") != 1) throw ConfigError("not a version-1 checkpoint");
    const auto& s = doc.at("shape");
    FeatureShape shape{s.at("instances").get<int>(), s.at("nodes").get<int>(), s.at("paths").get<int>(),
                       s.at("levels").get<int>()};
    QFunction qf(shape, architecture_from_json(doc.at("architecture")), 0);
    std::vector<std::pair<int, int>> layers;
    for (const auto& l : doc.at("layers")) layers.emplace_back(l.at(0).get<int>(), l.at(1).get<int>());
    if (layers != qf.parameter_shapes()) throw ConfigError("checkpoint layer shapes do not match architecture");
    qf.set_parameters(doc.at("parameters").get<std::vector<double>>());
    return qf;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace pira
