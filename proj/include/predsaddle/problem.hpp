#pragma once

#include <memory>
#include <optional>

#include "predsaddle/rng.hpp"
#include "predsaddle/types.hpp"

namespace predsaddle {

struct SaddlePoint {
  Vec u;
  Vec v;
};

// A min-max problem: loss L(u, v) minimized over u and maximized over v,
// with exact partial gradients and (optionally) a stochastic gradient oracle
// and a known saddle point.
//
// Problems are immutable after construction and safe to share across threads.
// Stochastic gradient calls draw from a caller-owned Rng stream; a stream must
// not be shared between concurrent callers.
class SaddleProblem {
 public:
  virtual ~SaddleProblem() = default;

  virtual Eigen::Index dim_u() const = 0;
  virtual Eigen::Index dim_v() const = 0;

  virtual double loss(const Vec& u, const Vec& v) const = 0;
  virtual Vec grad_u(const Vec& u, const Vec& v) const = 0;
  virtual Vec grad_v(const Vec& u, const Vec& v) const = 0;

  // Stochastic oracles default to the exact gradients.
  virtual Vec stochastic_grad_u(const Vec& u, const Vec& v, Rng& rng) const {
    (void)rng;
    return grad_u(u, v);
  }
  virtual Vec stochastic_grad_v(const Vec& u, const Vec& v, Rng& rng) const {
    (void)rng;
    return grad_v(u, v);
  }

  virtual std::optional<SaddlePoint> saddle() const { return std::nullopt; }
};

using ProblemPtr = std::shared_ptr<const SaddleProblem>;

// L(u, v) = v^T K u. Saddle at the origin.
class BilinearSaddle final : public SaddleProblem {
 public:
  explicit BilinearSaddle(Mat K);

  Eigen::Index dim_u() const override { return K_.cols(); }
  Eigen::Index dim_v() const override { return K_.rows(); }
  double loss(const Vec& u, const Vec& v) const override;
  Vec grad_u(const Vec& u, const Vec& v) const override;
  Vec grad_v(const Vec& u, const Vec& v) const override;
  std::optional<SaddlePoint> saddle() const override;

  const Mat& coupling() const { return K_; }

 private:
  Mat K_;
};

ProblemPtr make_bilinear(const Mat& K);

// Additive i.i.d. Gaussian noise on each gradient evaluation, per coordinate.
// noise_std = 0 reproduces the exact-gradient problem bit-for-bit; two streams
// seeded identically yield identical gradient sequences.
struct NoisyGradientConfig {
  double noise_std = 0.0;
  std::uint64_t seed = 0;
};

ProblemPtr with_noise(ProblemPtr problem, const NoisyGradientConfig& cfg);

// P(u, v) = L(u, v*) - L(u*, v). Zero exactly at the saddle; nonnegative for
// convex-concave losses. Throws GapUnavailableError if the problem has no
// known saddle.
double primal_dual_gap(const SaddleProblem& problem, const Vec& u, const Vec& v);

struct GradCheck {
  double err_u = 0.0;
  double err_v = 0.0;
};

// Max relative error between the exact gradients and central differences of
// the loss with step h. The relative-error denominator is max(|exact|_inf, 1)
// so zero gradients stay well defined.
GradCheck finite_diff_check(const SaddleProblem& problem, const Vec& u, const Vec& v, double h);

}  // namespace predsaddle
