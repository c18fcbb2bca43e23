#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "pira/features.hpp"
#include "pira/nn.hpp"

namespace pira {

struct Architecture {
  enum class Kind { Graph, Flat };
  Kind kind = Kind::Graph;
  int width = 64;        // entity embedding / dense hidden width
  int rounds = 2;        // message-passing rounds (graph only)
  int head_width = 64;   // value and advantage head hidden width
  bool dueling_product = false;

  bool operator==(const Architecture&) const = default;
};

struct OptimizerConfig {
  enum class Kind { Sgd, Adam };
  Kind kind = Kind::Sgd;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 0.0;   // 0 disables gradient clipping

  bool operator==(const OptimizerConfig&) const = default;
};

struct TrainSample {
  const StateFeatures* features = nullptr;
  int action = 0;
  double target = 0.0;
};

struct TrainResult {
  double loss = 0.0;
  bool applied = false;   // false when the gradient was not finite
};

/// Per-(instance, node, path) bits fed to the advantage head: path starts
/// at the PoA, path reaches the node, instance serves the service, instance
/// capacity slack, instance active, instance hosted on the node, instance
/// hosted elsewhere.
inline constexpr int kPairFeatureWidth = 7;

namespace detail {
class Network;
}

/// State-action value function over the dense action space.
class QFunction {
 public:
  QFunction(FeatureShape shape, Architecture arch, std::uint64_t seed,
            OptimizerConfig optimizer = {});
  QFunction(const QFunction& other);
  QFunction& operator=(const QFunction& other);
  QFunction(QFunction&&) noexcept;
  QFunction& operator=(QFunction&&) noexcept;
  ~QFunction();

  const FeatureShape& shape() const { return shape_; }
  const Architecture& architecture() const { return arch_; }
  int action_count() const { return shape_.action_count(); }

  /// One Q-value per action. Throws Error on a shape mismatch.
  Eigen::VectorXd q_values(const StateFeatures& features) const;
  /// One row of Q-values per state, evaluated in a single pass.
  Eigen::MatrixXd q_values(const std::vector<const StateFeatures*>& batch) const;
  /// State value and raw advantages before the dueling combination.
  std::pair<double, Eigen::VectorXd> heads(const StateFeatures& features) const;

  /// Mean of 0.5 (Q(s, a) - y)^2 over the batch.
  double loss(const std::vector<TrainSample>& batch) const;
  /// Loss and its gradient with respect to parameters(); targets are constants.
  double loss_gradient(const std::vector<TrainSample>& batch, std::vector<double>& gradient) const;
  /// One optimizer step with step size `sigma`; skipped when the gradient is not finite.
  TrainResult train_step(const std::vector<TrainSample>& batch, double sigma);

  std::vector<double> parameters() const;
  void set_parameters(const std::vector<double>& values);
  std::vector<std::pair<int, int>> parameter_shapes() const;
  std::size_t parameter_count() const;
  /// Copies weights (not optimizer state) from another network of the same layout.
  void copy_weights_from(const QFunction& other);
  bool same_weights(const QFunction& other) const;

  nlohmann::json to_json() const;
  static QFunction from_json(const nlohmann::json& doc);

 private:
  FeatureShape shape_;
  Architecture arch_;
  OptimizerConfig opt_;
  std::unique_ptr<detail::Network> net_;
  std::vector<double> moment1_;
  std::vector<double> moment2_;
  long steps_ = 0;
};

inline Eigen::VectorXd q_values(const QFunction& qf, const StateFeatures& features) {
  return qf.q_values(features);
}

nlohmann::json architecture_to_json(const Architecture& arch);
/// Missing keys keep the values of `base`.
Architecture architecture_from_json(const nlohmann::json& doc, const Architecture& base = {});

}  // namespace pira
