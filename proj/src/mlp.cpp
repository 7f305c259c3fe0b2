#include "predsaddle/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace predsaddle {

namespace {

Mat apply_activation(Activation act, const Mat& z) {
  switch (act) {
    case Activation::tanh:
      // tanh through exp so the whole batch stays on the SIMD path; saturates
      // to exactly +-1 when exp(2z) overflows or underflows.
      return (1.0 - 2.0 / ((2.0 * z.array()).exp() + 1.0)).matrix();
    case Activation::linear:
      return z;
    case Activation::sigmoid:
      return (1.0 / (1.0 + (-z.array()).exp())).matrix();
  }
  throw std::logic_error("unreachable activation");
}

// Derivative expressed through the activation output.
Mat activation_grad(Activation act, const Mat& post) {
  switch (act) {
    case Activation::tanh:
      return (1.0 - post.array().square()).matrix();
    case Activation::linear:
      return Mat::Ones(post.rows(), post.cols());
    case Activation::sigmoid:
      return (post.array() * (1.0 - post.array())).matrix();
  }
  throw std::logic_error("unreachable activation");
}

}  // namespace

Vec MlpGrad::flatten() const {
  Eigen::Index total = 0;
  for (size_t l = 0; l < dW.size(); ++l) total += dW[l].size() + db[l].size();
  Vec out(total);
  Eigen::Index at = 0;
  for (size_t l = 0; l < dW.size(); ++l) {
    out.segment(at, dW[l].size()) = Eigen::Map<const Vec>(dW[l].data(), dW[l].size());
    at += dW[l].size();
    out.segment(at, db[l].size()) = db[l];
    at += db[l].size();
  }
  return out;
}

Mlp::Mlp(const std::vector<Eigen::Index>& dims, const std::vector<Activation>& acts) {
  if (dims.size() < 2 || acts.size() != dims.size() - 1)
    throw DimensionError("mlp: need dims {in, ..., out} and one activation per layer");
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    if (dims[l] < 1 || dims[l + 1] < 1) throw DimensionError("mlp: layer dims must be positive");
    layers_.push_back(MlpLayer{Mat::Zero(dims[l + 1], dims[l]), Vec::Zero(dims[l + 1]), acts[l]});
  }
}

Mlp Mlp::random(const std::vector<Eigen::Index>& dims, const std::vector<Activation>& acts,
                Rng& rng) {
  Mlp net(dims, acts);
  for (auto& layer : net.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.W.cols()));
    for (Eigen::Index j = 0; j < layer.W.cols(); ++j)
      for (Eigen::Index i = 0; i < layer.W.rows(); ++i)
        layer.W(i, j) = bound * (2 * rng.uniform() - 1);
    for (Eigen::Index i = 0; i < layer.b.size(); ++i) layer.b[i] = bound * (2 * rng.uniform() - 1);
  }
  ++net.version_;
  return net;
}

Mat Mlp::forward(const Mat& x) const {
  MlpCache cache;
  return forward(x, cache);
}

Mat Mlp::forward(const Mat& x, MlpCache& cache) const {
  if (x.rows() != in_dim()) throw DimensionError("mlp forward: input dimension mismatch");
  cache.input = x;
  cache.pre.clear();
  cache.post.clear();
  cache.net = this;
  cache.version = version_;
  Mat a = x;
  for (const auto& layer : layers_) {
    Mat z = (layer.W * a).colwise() + layer.b;
    a = apply_activation(layer.act, z);
    cache.pre.push_back(std::move(z));
    cache.post.push_back(a);
  }
  return a;
}

MlpGrad Mlp::backward(const MlpCache& cache, const Mat& d_output, Mat* d_input) const {
  if (cache.net != this || cache.version != version_)
    throw std::invalid_argument("mlp backward: stale cache (network changed since forward)");
  if (cache.post.size() != layers_.size())
    throw std::invalid_argument("mlp backward: cache does not match this network");
  if (d_output.rows() != out_dim() || d_output.cols() != cache.input.cols())
    throw DimensionError("mlp backward: upstream gradient shape mismatch");

  MlpGrad grad;
  grad.dW.resize(layers_.size());
  grad.db.resize(layers_.size());
  Mat delta = d_output;
  for (std::ptrdiff_t l = static_cast<std::ptrdiff_t>(layers_.size()) - 1; l >= 0; --l) {
    const auto li = static_cast<size_t>(l);
    delta = delta.cwiseProduct(activation_grad(layers_[li].act, cache.post[li]));
    const Mat& layer_input = l == 0 ? cache.input : cache.post[li - 1];
    grad.dW[li] = delta * layer_input.transpose();
    grad.db[li] = delta.rowwise().sum();
    if (l > 0 || d_input) {
      Mat next = layers_[li].W.transpose() * delta;
      if (l == 0) {
        *d_input = std::move(next);
      } else {
        delta = std::move(next);
      }
    }
  }
  return grad;
}

Eigen::Index Mlp::n_params() const {
  Eigen::Index total = 0;
  for (const auto& layer : layers_) total += layer.W.size() + layer.b.size();
  return total;
}

Vec Mlp::flatten() const {
  Vec out(n_params());
  Eigen::Index at = 0;
  for (const auto& layer : layers_) {
    out.segment(at, layer.W.size()) = Eigen::Map<const Vec>(layer.W.data(), layer.W.size());
    at += layer.W.size();
    out.segment(at, layer.b.size()) = layer.b;
    at += layer.b.size();
  }
  return out;
}

void Mlp::unflatten(const Vec& theta) {
  if (theta.size() != n_params()) throw DimensionError("mlp unflatten: parameter size mismatch");
  Eigen::Index at = 0;
  for (auto& layer : layers_) {
    Eigen::Map<Vec>(layer.W.data(), layer.W.size()) = theta.segment(at, layer.W.size());
    at += layer.W.size();
    layer.b = theta.segment(at, layer.b.size());
    at += layer.b.size();
  }
  ++version_;
}

}  // namespace predsaddle
