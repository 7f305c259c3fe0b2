#pragma once

#include <cstdint>
#include <vector>

#include "predsaddle/rng.hpp"
#include "predsaddle/types.hpp"

namespace predsaddle {

enum class Activation { tanh, linear, sigmoid };

struct MlpLayer {
  Mat W;
  Vec b;
  Activation act = Activation::linear;
};

class Mlp;

// Forward-pass cache consumed by backward(). Tied to the network version that
// produced it; backward() rejects a cache taken before a parameter update.
struct MlpCache {
  Mat input;
  std::vector<Mat> pre;   // W x + b per layer
  std::vector<Mat> post;  // activation output per layer
  const Mlp* net = nullptr;
  std::uint64_t version = 0;
};

struct MlpGrad {
  std::vector<Mat> dW;
  std::vector<Vec> db;
  Vec flatten() const;
};

// Small fully connected net over column-batched inputs (in_dim x batch).
// Parameters flatten layer by layer (column-major W, then b) into one vector;
// flatten/unflatten round-trip exactly.
class Mlp {
 public:
  // dims = {in, h1, ..., out}; acts has one entry per layer.
  Mlp(const std::vector<Eigen::Index>& dims, const std::vector<Activation>& acts);

  // Seeded init, uniform on [-1/sqrt(fan_in), +1/sqrt(fan_in)] per layer.
  static Mlp random(const std::vector<Eigen::Index>& dims, const std::vector<Activation>& acts,
                    Rng& rng);

  Mat forward(const Mat& x) const;
  Mat forward(const Mat& x, MlpCache& cache) const;

  // Reverse-mode gradients of sum(upstream .* output) w.r.t. parameters; also
  // fills the gradient w.r.t. the input batch when d_input is non-null.
  MlpGrad backward(const MlpCache& cache, const Mat& d_output, Mat* d_input = nullptr) const;

  Eigen::Index n_params() const;
  Vec flatten() const;
  void unflatten(const Vec& theta);

  Eigen::Index in_dim() const { return layers_.front().W.cols(); }
  Eigen::Index out_dim() const { return layers_.back().W.rows(); }
  const std::vector<MlpLayer>& layers() const { return layers_; }
  std::uint64_t version() const { return version_; }

 private:
  std::vector<MlpLayer> layers_;
  std::uint64_t version_ = 0;
};

}  // namespace predsaddle
