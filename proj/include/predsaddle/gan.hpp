#pragma once

#include <utility>
#include <vector>

#include "predsaddle/mixture.hpp"
#include "predsaddle/mlp.hpp"
#include "predsaddle/solver.hpp"

namespace predsaddle {

// f(x) = log(x) objective. `saturating` descends the same objective the
// discriminator ascends; `non_saturating` is the common heuristic where the
// generator descends -E[log D(G(z))] instead.
enum class GanObjective { saturating, non_saturating };

struct GanConfig {
  MixtureSpec data;
  int batch_size = 512;
  Eigen::Index latent_dim = 2;
  std::vector<Eigen::Index> gen_hidden = {128, 128};
  std::vector<Eigen::Index> disc_hidden = {128, 128};
  GanObjective objective = GanObjective::saturating;
  // Discriminator outputs are clamped to [clamp_eps, 1 - clamp_eps] inside the
  // loss so log stays finite for every parameter value.
  double clamp_eps = 1e-7;
};

// Two-player objective
//   min_g max_d  mean log D(x_real) + mean log(1 - D(G(z)))
// exposed as a SaddleProblem with u = generator parameters and
// v = discriminator parameters.
//
// The SaddleProblem loss and exact gradients are evaluated on a frozen batch
// drawn at construction, so they are deterministic functions of (u, v); the
// stochastic oracles resample real and latent batches from the caller's
// stream. Generator: latent -> tanh hiddens -> linear. Discriminator:
// sample -> tanh hiddens -> sigmoid.
class GanProblem final : public SaddleProblem {
 public:
  GanProblem(GanConfig cfg, std::uint64_t init_seed);

  Eigen::Index dim_u() const override { return gen_proto_.n_params(); }
  Eigen::Index dim_v() const override { return disc_proto_.n_params(); }
  double loss(const Vec& theta_g, const Vec& theta_d) const override;
  Vec grad_u(const Vec& theta_g, const Vec& theta_d) const override;
  Vec grad_v(const Vec& theta_g, const Vec& theta_d) const override;
  Vec stochastic_grad_u(const Vec& theta_g, const Vec& theta_d, Rng& rng) const override;
  Vec stochastic_grad_v(const Vec& theta_g, const Vec& theta_d, Rng& rng) const override;

  Vec initial_theta_g() const { return init_g_; }
  Vec initial_theta_d() const { return init_d_; }

  double batch_loss(const Vec& theta_g, const Vec& theta_d, const Mat& real, const Mat& z) const;
  // Partial gradients on a given batch pair: first the generator gradient (of
  // the objective the generator descends), then the discriminator gradient of
  // the two-player objective.
  std::pair<Vec, Vec> gan_gradients(const Vec& theta_g, const Vec& theta_d, const Mat& real,
                                    const Mat& z) const;
  Vec generator_gradient(const Vec& theta_g, const Vec& theta_d, const Mat& z) const;
  Vec discriminator_gradient(const Vec& theta_g, const Vec& theta_d, const Mat& real,
                             const Mat& z) const;

  Mat generate(const Vec& theta_g, const Mat& z) const;
  Mat sample_latent(std::int64_t n, Rng& rng) const;
  Mat discriminate(const Vec& theta_d, const Mat& x) const;

  const GanConfig& config() const { return cfg_; }

 private:
  Mlp generator(const Vec& theta_g) const;
  Mlp discriminator(const Vec& theta_d) const;

  GanConfig cfg_;
  Mlp gen_proto_, disc_proto_;
  Vec init_g_, init_d_;
  Mat eval_real_, eval_z_;
};

struct GanTrainOptions {
  Method method = Method::predict;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::int64_t n_steps = 5000;
  std::uint64_t seed = 1;
  std::int64_t record_every = 100;
  std::int64_t eval_every = 500;
  std::int64_t n_probe = 10000;
  double threshold_sigmas = 3.0;
  double min_fraction = 0.2;
};

struct CoveragePoint {
  std::int64_t step = 0;
  int covered = 0;
};

struct GanTrainResult {
  TrajectoryRecord trajectory;
  std::vector<CoveragePoint> coverage;
  ModeCoverage final_coverage;
  Mat final_samples;  // generator probe output at the last evaluated step
};

// Alternating Adam training with the generator as the predicted (primal)
// variable. Coverage is evaluated on a fixed latent probe drawn once per run;
// everything is deterministic in (config, options).
GanTrainResult train_gan(const GanConfig& cfg, const GanTrainOptions& opts);

}  // namespace predsaddle
