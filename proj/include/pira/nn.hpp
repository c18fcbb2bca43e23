#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pira/common.hpp"

namespace pira::nn {

/// A trainable tensor and its accumulated gradient.
struct Param {
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;

  Param() = default;
  Param(Eigen::Index rows, Eigen::Index cols)
      : value(Eigen::MatrixXd::Zero(rows, cols)), grad(Eigen::MatrixXd::Zero(rows, cols)) {}
  void zero_grad() { grad.setZero(); }
};

/// Uniform(-a, a) with a = gain * sqrt(6 / (fan_in + fan_out)).
void init_uniform(Param& p, Rng& rng, double gain = 1.0);

Eigen::MatrixXd relu(const Eigen::MatrixXd& x);
/// dy masked by x > 0.
Eigen::MatrixXd relu_backward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dy);

/// Fully connected layer on row-stacked samples: y = x W^T + b.
class Dense {
 public:
  Dense() = default;
  Dense(int in, int out, Rng& rng, double gain = 1.0);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  /// Accumulates dW, db; returns dx.
  Eigen::MatrixXd backward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dy);

  template <class F>
  void visit(F&& f) {
    f(weight);
    f(bias);
  }
  template <class F>
  void visit(F&& f) const {
    f(weight);
    f(bias);
  }

  Param weight;   // out x in
  Param bias;     // 1 x out
};

/// Row-stacked graphs: block j of `h` (rows j*n .. j*n+n-1) is multiplied
/// by *blocks[j], each n x n.
Eigen::MatrixXd block_product(const std::vector<const Eigen::MatrixXd*>& blocks, const Eigen::MatrixXd& h,
                              bool transpose = false);

/// One round of mean-aggregation message passing over a fixed graph:
///   h' = relu(h Ws^T + (A h) Wn^T + b)
/// with A the row-normalised neighbourhood matrix. Several graphs can be
/// processed at once by stacking their node rows and passing one
/// adjacency per graph.
class MessagePassing {
 public:
  struct Cache {
    Eigen::MatrixXd input;
    Eigen::MatrixXd aggregated;
    Eigen::MatrixXd pre;
  };

  MessagePassing() = default;
  MessagePassing(int width, Rng& rng);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& h, const Eigen::MatrixXd& adjacency,
                          Cache* cache = nullptr) const;
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& adjacency,
                           const Eigen::MatrixXd& dy);
  Eigen::MatrixXd forward(const Eigen::MatrixXd& h, const std::vector<const Eigen::MatrixXd*>& adjacency,
                          Cache* cache = nullptr) const;
  Eigen::MatrixXd backward(const Cache& cache, const std::vector<const Eigen::MatrixXd*>& adjacency,
                           const Eigen::MatrixXd& dy);

  template <class F>
  void visit(F&& f) {
    f(self);
    f(neighbor);
    f(bias);
  }
  template <class F>
  void visit(F&& f) const {
    f(self);
    f(neighbor);
    f(bias);
  }

  Param self;
  Param neighbor;
  Param bias;
};

/// Q from a state value and per-action advantages. Additive form:
/// Q_a = value + adv_a - mean(adv); product form: value * (adv_a - mean(adv)).
Eigen::VectorXd dueling_combine(double value, const Eigen::VectorXd& advantages, bool product = false);

/// Given dL/dQ, returns dL/dvalue and writes dL/dadvantages.
double dueling_backward(double value, const Eigen::VectorXd& advantages, const Eigen::VectorXd& dq,
                        bool product, Eigen::VectorXd& d_advantages);

}  // namespace pira::nn
