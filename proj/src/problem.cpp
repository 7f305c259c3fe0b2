#include "predsaddle/problem.hpp"

#include <cmath>
#include <utility>

namespace predsaddle {

BilinearSaddle::BilinearSaddle(Mat K) : K_(std::move(K)) {
  if (K_.size() == 0) throw DimensionError("bilinear coupling matrix must be nonempty");
  if (!K_.allFinite()) throw std::invalid_argument("bilinear coupling matrix has non-finite entries");
}

double BilinearSaddle::loss(const Vec& u, const Vec& v) const { return v.dot(K_ * u); }

Vec BilinearSaddle::grad_u(const Vec& u, const Vec& v) const {
  (void)u;
  return K_.transpose() * v;
}

Vec BilinearSaddle::grad_v(const Vec& u, const Vec& v) const {
  (void)v;
  return K_ * u;
}

std::optional<SaddlePoint> BilinearSaddle::saddle() const {
  return SaddlePoint{Vec::Zero(dim_u()), Vec::Zero(dim_v())};
}

ProblemPtr make_bilinear(const Mat& K) { return std::make_shared<BilinearSaddle>(K); }

namespace {

class NoisyProblem final : public SaddleProblem {
 public:
  NoisyProblem(ProblemPtr base, NoisyGradientConfig cfg) : base_(std::move(base)), cfg_(cfg) {
    if (cfg_.noise_std < 0) throw std::invalid_argument("noise_std must be nonnegative");
  }

  Eigen::Index dim_u() const override { return base_->dim_u(); }
  Eigen::Index dim_v() const override { return base_->dim_v(); }
  double loss(const Vec& u, const Vec& v) const override { return base_->loss(u, v); }
  Vec grad_u(const Vec& u, const Vec& v) const override { return base_->grad_u(u, v); }
  Vec grad_v(const Vec& u, const Vec& v) const override { return base_->grad_v(u, v); }

  Vec stochastic_grad_u(const Vec& u, const Vec& v, Rng& rng) const override {
    return perturb(base_->stochastic_grad_u(u, v, rng), rng);
  }
  Vec stochastic_grad_v(const Vec& u, const Vec& v, Rng& rng) const override {
    return perturb(base_->stochastic_grad_v(u, v, rng), rng);
  }

  std::optional<SaddlePoint> saddle() const override { return base_->saddle(); }

 private:
  Vec perturb(Vec g, Rng& rng) const {
    if (cfg_.noise_std == 0.0) return g;
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] += cfg_.noise_std * rng.normal();
    return g;
  }

  ProblemPtr base_;
  NoisyGradientConfig cfg_;
};

}  // namespace

ProblemPtr with_noise(ProblemPtr problem, const NoisyGradientConfig& cfg) {
  return std::make_shared<NoisyProblem>(std::move(problem), cfg);
}

double primal_dual_gap(const SaddleProblem& problem, const Vec& u, const Vec& v) {
  const auto s = problem.saddle();
  if (!s) throw GapUnavailableError();
  return problem.loss(u, s->v) - problem.loss(s->u, v);
}

namespace {

double rel_err(const Vec& exact, const Vec& approx) {
  const double denom = std::max(exact.lpNorm<Eigen::Infinity>(), 1.0);
  return (exact - approx).lpNorm<Eigen::Infinity>() / denom;
}

}  // namespace

GradCheck finite_diff_check(const SaddleProblem& problem, const Vec& u, const Vec& v, double h) {
  if (!(h > 0)) throw std::invalid_argument("finite_diff_check: h must be positive");
  Vec fd_u(u.size());
  {
    Vec up = u;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double x = u[i];
      up[i] = x + h;
      const double f_plus = problem.loss(up, v);
      up[i] = x - h;
      const double f_minus = problem.loss(up, v);
      up[i] = x;
      fd_u[i] = (f_plus - f_minus) / (2 * h);
    }
  }
  Vec fd_v(v.size());
  {
    Vec vp = v;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double x = vp[i];
      vp[i] = x + h;
      const double f_plus = problem.loss(u, vp);
      vp[i] = x - h;
      const double f_minus = problem.loss(u, vp);
      vp[i] = x;
      fd_v[i] = (f_plus - f_minus) / (2 * h);
    }
  }
  return GradCheck{rel_err(problem.grad_u(u, v), fd_u), rel_err(problem.grad_v(u, v), fd_v)};
}

}  // namespace predsaddle
