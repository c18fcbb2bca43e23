#include "pira/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace pira::nn {

void init_uniform(Param& p, Rng& rng, double gain) {
  const double a = gain * std::sqrt(6.0 / static_cast<double>(p.value.rows() + p.value.cols()));
  for (Eigen::Index c = 0; c < p.value.cols(); ++c)
    for (Eigen::Index r = 0; r < p.value.rows(); ++r) p.value(r, c) = rng.uniform(-a, a);
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& x) { return x.cwiseMax(0.0); }

Eigen::MatrixXd relu_backward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dy) {
  return (x.array() > 0.0).select(dy, 0.0);
}

Dense::Dense(int in, int out, Rng& rng, double gain) : weight(out, in), bias(1, out) {
  init_uniform(weight, rng, gain);
}

Eigen::MatrixXd Dense::forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd y = x * weight.value.transpose();
  y.rowwise() += bias.value.row(0);
  return y;
}

Eigen::MatrixXd Dense::backward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dy) {
  weight.grad.noalias() += dy.transpose() * x;
  bias.grad += dy.colwise().sum();
  return dy * weight.value;
}

Eigen::MatrixXd block_product(const std::vector<const Eigen::MatrixXd*>& blocks, const Eigen::MatrixXd& h,
                              bool transpose) {
  Eigen::MatrixXd out(h.rows(), h.cols());
  Eigen::Index at = 0;
  for (const auto* a : blocks) {
    const Eigen::Index n = a->rows();
    if (a->cols() != n || at + n > h.rows()) throw std::invalid_argument("block_product: shape mismatch");
    if (transpose)
      out.middleRows(at, n).noalias() = a->transpose() * h.middleRows(at, n);
    else
      out.middleRows(at, n).noalias() = *a * h.middleRows(at, n);
    at += n;
  }
  if (at != h.rows()) throw std::invalid_argument("block_product: rows not covered by blocks");
  return out;
}

MessagePassing::MessagePassing(int width, Rng& rng) : self(width, width), neighbor(width, width), bias(1, width) {
  init_uniform(self, rng);
  init_uniform(neighbor, rng);
}

Eigen::MatrixXd MessagePassing::forward(const Eigen::MatrixXd& h, const Eigen::MatrixXd& adjacency,
                                        Cache* cache) const {
  return forward(h, std::vector<const Eigen::MatrixXd*>{&adjacency}, cache);
}

Eigen::MatrixXd MessagePassing::backward(const Cache& cache, const Eigen::MatrixXd& adjacency,
                                         const Eigen::MatrixXd& dy) {
  return backward(cache, std::vector<const Eigen::MatrixXd*>{&adjacency}, dy);
}

Eigen::MatrixXd MessagePassing::forward(const Eigen::MatrixXd& h, const std::vector<const Eigen::MatrixXd*>& adjacency,
                                        Cache* cache) const {
  Eigen::MatrixXd aggregated = block_product(adjacency, h);
  Eigen::MatrixXd pre = h * self.value.transpose() + aggregated * neighbor.value.transpose();
  pre.rowwise() += bias.value.row(0);
  Eigen::MatrixXd out = relu(pre);
  if (cache) {
    cache->input = h;
    cache->aggregated = std::move(aggregated);
    cache->pre = std::move(pre);
  }
  return out;
}

Eigen::MatrixXd MessagePassing::backward(const Cache& cache, const std::vector<const Eigen::MatrixXd*>& adjacency,
                                         const Eigen::MatrixXd& dy) {
  const Eigen::MatrixXd dpre = relu_backward(cache.pre, dy);
  self.grad.noalias() += dpre.transpose() * cache.input;
  neighbor.grad.noalias() += dpre.transpose() * cache.aggregated;
  bias.grad += dpre.colwise().sum();
  Eigen::MatrixXd dx = dpre * self.value;
  dx += block_product(adjacency, dpre * neighbor.value, true);
  return dx;
}

Eigen::VectorXd dueling_combine(double value, const Eigen::VectorXd& adv, bool product) {
  const double mean = adv.size() > 0 ? adv.mean() : 0.0;
  Eigen::VectorXd centered = adv.array() - mean;
  if (product) return value * centered;
  return centered.array() + value;
}

double dueling_backward(double value, const Eigen::VectorXd& adv, const Eigen::VectorXd& dq, bool product,
                        Eigen::VectorXd& d_adv) {
  const double dq_mean = dq.size() > 0 ? dq.mean() : 0.0;
  if (product) {
    const double mean = adv.size() > 0 ? adv.mean() : 0.0;
    d_adv = value * (dq.array() - dq_mean);
    return dq.dot((adv.array() - mean).matrix());
  }
  d_adv = dq.array() - dq_mean;
  return dq.sum();
}

}  // namespace pira::nn
