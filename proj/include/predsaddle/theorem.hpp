#pragma once

#include <cstdint>
#include <vector>

#include "predsaddle/solver.hpp"

namespace predsaddle {

// L(u, v) = (mu/2)|u|^2 + v^T K u - (mu/2)|v|^2.
// Convex in u and concave in v for mu >= 0, with saddle at the origin and
// primal-dual gap (mu/2)(|u|^2 + |v|^2). Negative mu is accepted so tests can
// exercise the convexity-violated controls.
class RegularizedSaddle final : public SaddleProblem {
 public:
  RegularizedSaddle(Mat K, double mu);

  Eigen::Index dim_u() const override { return K_.cols(); }
  Eigen::Index dim_v() const override { return K_.rows(); }
  double loss(const Vec& u, const Vec& v) const override;
  Vec grad_u(const Vec& u, const Vec& v) const override;
  Vec grad_v(const Vec& u, const Vec& v) const override;
  std::optional<SaddlePoint> saddle() const override;

  // |K| (operator norm): the Lipschitz constant of v -> grad_v in u.
  double lipschitz_v() const { return l_v_; }
  double mu() const { return mu_; }
  const Mat& coupling() const { return K_; }

 private:
  Mat K_;
  double mu_;
  double l_v_;
};

struct BoundConstants {
  double g_u = 0.0, g_v = 0.0;  // gradient second-moment bounds
  double d_u = 0.0, d_v = 0.0;  // iterate distance bounds
  double l_v = 0.0;             // Lipschitz constant of grad_v in u
  double c_alpha = 0.0, c_beta = 0.0;

  // Empirical G and D scaled up by `factor`; the analytic l_v and the rate
  // constants are left alone.
  BoundConstants inflated(double factor) const;
};

// Right-hand side of the averaged-gap error bound at horizon l:
//   (1/(2 sqrt(l))) (D_u^2/C_a + D_v^2/C_b)
//   + (sqrt(l+1)/l) (C_a G_u^2/2 + C_a L_v G_u^2 + C_a L_v D_v^2 + C_b G_v^2/2)
double evaluate_bound(const BoundConstants& c, std::int64_t l);

struct RateFit {
  std::vector<std::int64_t> ls;                 // recorded horizons
  std::vector<std::vector<double>> seed_gap;    // [seed][horizon], P(u_hat^l, v_hat^l)
  std::vector<double> mean_gap;                 // across non-collapsed seeds
  std::vector<std::uint64_t> seeds;
  std::vector<bool> seed_collapsed;

  bool has_fit = false;
  double slope_of_mean = 0.0, intercept_of_mean = 0.0;  // log10-log10 fit of mean curve
  std::vector<double> seed_slope;
  double slope_mean = 0.0, slope_std = 0.0;             // across seeds

  // Diagnostic companion: the running mean (1/l) sum_k P(u^k, v^k) of
  // instantaneous gaps, the quantity the averaged-gap bound telescopes
  // through. On strongly regularized problems the averaged-iterate gap decays
  // faster than this envelope.
  std::vector<double> mean_running_gap;
  double running_slope_of_mean = 0.0;

  BoundConstants constants;  // measured, uninflated
  std::int64_t fit_l_min = 0, fit_l_max = 0;
};

struct RateMeasureOptions {
  std::int64_t fit_l_min = 100;
  int points_per_decade = 20;
  Vec u0, v0;  // default: all-ones
};

// Runs the prediction method with SGD updates and alpha_k = C_a/sqrt(k),
// beta_k = C_b/sqrt(k) on the noisy problem, one run per seed, recording the
// averaged-iterate gap P(u_hat^l, v_hat^l) at log-spaced horizons and fitting
// the log-log slope on [fit_l_min, n_steps]. Collapsed seeds are excluded
// from the fit and flagged.
RateFit measure_rate(const RegularizedSaddle& problem, double noise_std, double c_alpha,
                     double c_beta, std::int64_t n_steps, const std::vector<std::uint64_t>& seeds,
                     const RateMeasureOptions& opts = {});

struct BoundCheck {
  std::vector<bool> ok;  // one per recorded horizon
  std::int64_t violations = 0;
};

// Asserts mean measured gap <= evaluate_bound at every recorded horizon.
BoundCheck check_bound_holds(const RateFit& fit, const BoundConstants& constants);

enum class LemmaKind { lemma1, lemma2 };

struct LemmaReport {
  std::vector<double> residuals;  // LHS - RHS per step; <= 0 when the lemma holds
  double max_residual = 0.0;
};

// Per-step inequality residuals on a deterministic (exact-gradient) trajectory
// produced by the prediction method with SGD updates and the given schedules.
// The trajectory must have been recorded with store_iterates; gradients are
// recomputed from the stored iterates, and the gradient-norm and distance
// bounds are instantiated with their realized per-step values.
LemmaReport lemma_contraction_check(const RegularizedSaddle& problem,
                                    const TrajectoryRecord& record, const Schedule& sched_u,
                                    const Schedule& sched_v, LemmaKind which);

}  // namespace predsaddle
