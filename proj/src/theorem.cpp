#include "predsaddle/theorem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "predsaddle/dynamics.hpp"

namespace predsaddle {

RegularizedSaddle::RegularizedSaddle(Mat K, double mu) : K_(std::move(K)), mu_(mu) {
  if (K_.size() == 0) throw DimensionError("regularized saddle: coupling matrix must be nonempty");
  if (!K_.allFinite() || !std::isfinite(mu))
    throw std::invalid_argument("regularized saddle: non-finite inputs");
  const JacobiResult eig = jacobi_eigh(Mat(K_.transpose() * K_));
  l_v_ = std::sqrt(std::max(0.0, eig.eigenvalues.maxCoeff()));
}

double RegularizedSaddle::loss(const Vec& u, const Vec& v) const {
  return 0.5 * mu_ * u.squaredNorm() + v.dot(K_ * u) - 0.5 * mu_ * v.squaredNorm();
}

Vec RegularizedSaddle::grad_u(const Vec& u, const Vec& v) const {
  return mu_ * u + K_.transpose() * v;
}

Vec RegularizedSaddle::grad_v(const Vec& u, const Vec& v) const { return K_ * u - mu_ * v; }

std::optional<SaddlePoint> RegularizedSaddle::saddle() const {
  return SaddlePoint{Vec::Zero(dim_u()), Vec::Zero(dim_v())};
}

BoundConstants BoundConstants::inflated(double factor) const {
  BoundConstants c = *this;
  c.g_u *= factor;
  c.g_v *= factor;
  c.d_u *= factor;
  c.d_v *= factor;
  return c;
}

double evaluate_bound(const BoundConstants& c, std::int64_t l) {
  if (l < 1) throw std::invalid_argument("evaluate_bound: l must be >= 1");
  const double ld = static_cast<double>(l);
  const double head = (c.d_u * c.d_u / c.c_alpha + c.d_v * c.d_v / c.c_beta) / (2 * std::sqrt(ld));
  const double tail = std::sqrt(ld + 1) / ld *
                      (c.c_alpha * c.g_u * c.g_u / 2 + c.c_alpha * c.l_v * c.g_u * c.g_u +
                       c.c_alpha * c.l_v * c.d_v * c.d_v + c.c_beta * c.g_v * c.g_v / 2);
  return head + tail;
}

namespace {

std::vector<std::int64_t> log_spaced_horizons(std::int64_t n_steps, int points_per_decade) {
  std::vector<std::int64_t> ls;
  double x = 1.0;
  const double factor = std::pow(10.0, 1.0 / points_per_decade);
  while (true) {
    const auto l = static_cast<std::int64_t>(std::llround(x));
    if (l > n_steps) break;
    if (ls.empty() || ls.back() != l) ls.push_back(l);
    x *= factor;
  }
  if (ls.empty() || ls.back() != n_steps) ls.push_back(n_steps);
  return ls;
}

struct LogLogFit {
  bool ok = false;
  double slope = 0.0, intercept = 0.0;
};

LogLogFit fit_loglog(const std::vector<std::int64_t>& ls, const std::vector<double>& ys,
                     std::int64_t l_min, std::int64_t l_max) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::int64_t n = 0;
  for (size_t i = 0; i < ls.size(); ++i) {
    if (ls[i] < l_min || ls[i] > l_max) continue;
    if (!(ys[i] > 0) || !std::isfinite(ys[i])) continue;
    const double x = std::log10(static_cast<double>(ls[i]));
    const double y = std::log10(ys[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  LogLogFit fit;
  if (n < 2) return fit;
  const double nd = static_cast<double>(n);
  const double denom = nd * sxx - sx * sx;
  if (denom == 0) return fit;
  fit.ok = true;
  fit.slope = (nd * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / nd;
  return fit;
}

}  // namespace

RateFit measure_rate(const RegularizedSaddle& problem, double noise_std, double c_alpha,
                     double c_beta, std::int64_t n_steps, const std::vector<std::uint64_t>& seeds,
                     const RateMeasureOptions& opts) {
  if (n_steps < 1) throw std::invalid_argument("measure_rate: n_steps must be >= 1");
  if (seeds.empty()) throw std::invalid_argument("measure_rate: need at least one seed");

  const Vec u0 = opts.u0.size() ? opts.u0 : Vec::Ones(problem.dim_u());
  const Vec v0 = opts.v0.size() ? opts.v0 : Vec::Ones(problem.dim_v());
  const Schedule sched_u = Schedule::inverse_sqrt(c_alpha);
  const Schedule sched_v = Schedule::inverse_sqrt(c_beta);
  const auto saddle = problem.saddle().value();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  RateFit fit;
  fit.ls = log_spaced_horizons(n_steps, opts.points_per_decade);
  fit.seeds = seeds;
  fit.fit_l_min = opts.fit_l_min;
  fit.fit_l_max = n_steps;

  const auto n = static_cast<size_t>(n_steps);
  // Per-step sums across seeds of |g|^2 and squared distances; the bound
  // constants take max over k of the seed means.
  std::vector<double> sum_gu2(n, 0.0), sum_gv2(n, 0.0), sum_du2(n, 0.0), sum_dv2(n, 0.0);
  std::vector<std::vector<double>> seed_running;
  std::int64_t completed_seeds = 0;

  for (const std::uint64_t seed : seeds) {
    const ProblemPtr noisy =
        with_noise(std::make_shared<RegularizedSaddle>(problem), NoisyGradientConfig{noise_std, seed});
    SolverState st = SolverState::init(u0, v0, Updater::sgd(), Updater::sgd());
    Rng rng(seed);
    Vec sum_u = Vec::Zero(u0.size());
    Vec sum_v = Vec::Zero(v0.size());
    double gap_sum = 0.0;
    std::vector<double> gaps(fit.ls.size(), nan);
    std::vector<double> running(fit.ls.size(), nan);

    bool collapsed = false;
    size_t next_record = 0;
    StepTrace trace;
    for (std::int64_t k = 1; k <= n_steps; ++k) {
      try {
        step(*noisy, st, sched_u, sched_v, rng, StepOptions{.predict_primal = true}, &trace);
      } catch (const DivergenceError&) {
        collapsed = true;
        break;
      }
      sum_u += st.u_prev;
      sum_v += st.v_prev;
      gap_sum += primal_dual_gap(problem, st.u_prev, st.v_prev);
      const auto i = static_cast<size_t>(k - 1);
      sum_gu2[i] += trace.g_u.squaredNorm();
      sum_gv2[i] += trace.g_v.squaredNorm();
      sum_du2[i] += (st.u_prev - saddle.u).squaredNorm();
      sum_dv2[i] += (st.v_prev - saddle.v).squaredNorm();
      while (next_record < fit.ls.size() && fit.ls[next_record] == k) {
        const double l = static_cast<double>(k);
        gaps[next_record] = primal_dual_gap(problem, Vec(sum_u / l), Vec(sum_v / l));
        running[next_record] = gap_sum / l;
        ++next_record;
      }
    }
    fit.seed_collapsed.push_back(collapsed);
    if (!collapsed) ++completed_seeds;
    fit.seed_gap.push_back(std::move(gaps));
    seed_running.push_back(std::move(running));
  }

  if (completed_seeds == 0) throw NumericalError("measure_rate: every seed collapsed");

  fit.mean_gap.assign(fit.ls.size(), 0.0);
  fit.mean_running_gap.assign(fit.ls.size(), 0.0);
  for (size_t i = 0; i < fit.ls.size(); ++i) {
    double s = 0, r = 0;
    for (size_t j = 0; j < seeds.size(); ++j) {
      if (fit.seed_collapsed[j]) continue;
      s += fit.seed_gap[j][i];
      r += seed_running[j][i];
    }
    fit.mean_gap[i] = s / static_cast<double>(completed_seeds);
    fit.mean_running_gap[i] = r / static_cast<double>(completed_seeds);
  }

  BoundConstants c;
  c.c_alpha = c_alpha;
  c.c_beta = c_beta;
  c.l_v = problem.lipschitz_v();
  double max_gu2 = 0, max_gv2 = 0, max_du2 = 0, max_dv2 = 0;
  for (size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(seeds.size());
    max_gu2 = std::max(max_gu2, sum_gu2[i] / s);
    max_gv2 = std::max(max_gv2, sum_gv2[i] / s);
    max_du2 = std::max(max_du2, sum_du2[i] / s);
    max_dv2 = std::max(max_dv2, sum_dv2[i] / s);
  }
  c.g_u = std::sqrt(max_gu2);
  c.g_v = std::sqrt(max_gv2);
  c.d_u = std::sqrt(max_du2);
  c.d_v = std::sqrt(max_dv2);
  fit.constants = c;

  const LogLogFit mean_fit = fit_loglog(fit.ls, fit.mean_gap, fit.fit_l_min, fit.fit_l_max);
  fit.has_fit = mean_fit.ok;
  fit.slope_of_mean = mean_fit.ok ? mean_fit.slope : nan;
  fit.intercept_of_mean = mean_fit.ok ? mean_fit.intercept : nan;
  const LogLogFit running_fit =
      fit_loglog(fit.ls, fit.mean_running_gap, fit.fit_l_min, fit.fit_l_max);
  fit.running_slope_of_mean = running_fit.ok ? running_fit.slope : nan;

  double s_sum = 0, s_sq = 0;
  std::int64_t s_n = 0;
  for (size_t j = 0; j < seeds.size(); ++j) {
    if (fit.seed_collapsed[j]) {
      fit.seed_slope.push_back(nan);
      continue;
    }
    const LogLogFit sf = fit_loglog(fit.ls, fit.seed_gap[j], fit.fit_l_min, fit.fit_l_max);
    fit.seed_slope.push_back(sf.ok ? sf.slope : nan);
    if (sf.ok) {
      s_sum += sf.slope;
      s_sq += sf.slope * sf.slope;
      ++s_n;
    }
  }
  if (s_n > 0) {
    fit.slope_mean = s_sum / static_cast<double>(s_n);
    fit.slope_std =
        s_n > 1 ? std::sqrt(std::max(0.0, (s_sq - s_sum * s_sum / static_cast<double>(s_n)) /
                                              static_cast<double>(s_n - 1)))
                : 0.0;
  } else {
    fit.slope_mean = nan;
    fit.slope_std = nan;
  }
  return fit;
}

BoundCheck check_bound_holds(const RateFit& fit, const BoundConstants& constants) {
  BoundCheck check;
  for (size_t i = 0; i < fit.ls.size(); ++i) {
    const bool ok = std::isfinite(fit.mean_gap[i]) &&
                    fit.mean_gap[i] <= evaluate_bound(constants, fit.ls[i]);
    check.ok.push_back(ok);
    if (!ok) ++check.violations;
  }
  return check;
}

LemmaReport lemma_contraction_check(const RegularizedSaddle& problem,
                                    const TrajectoryRecord& record, const Schedule& sched_u,
                                    const Schedule& sched_v, LemmaKind which) {
  const auto& uh = record.u_history;
  const auto& vh = record.v_history;
  if (uh.size() < 2 || vh.size() != uh.size())
    throw std::invalid_argument("lemma check needs a trajectory recorded with store_iterates");

  const auto saddle = problem.saddle().value();
  const double l_v = problem.lipschitz_v();

  LemmaReport report;
  report.max_residual = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < uh.size(); ++i) {
    const auto k = static_cast<std::int64_t>(i + 1);
    const double alpha = sched_u.rate(k);
    const double beta = sched_v.rate(k);
    const Vec& u_k = uh[i];
    const Vec& u_k1 = uh[i + 1];
    const Vec& v_k = vh[i];
    const Vec& v_k1 = vh[i + 1];

    const Vec g_u = problem.grad_u(u_k, v_k);
    const Vec u_bar = predict_point(u_k1, u_k);
    const Vec g_v = problem.grad_v(u_bar, v_k);

    // The reconstruction must match the prediction method with plain SGD
    // updates; anything else means the trajectory cannot be checked.
    const double scale_u = std::max(1.0, u_k.norm());
    const double scale_v = std::max(1.0, v_k.norm());
    if ((u_k1 - (u_k - alpha * g_u)).norm() > 1e-9 * scale_u ||
        (v_k1 - (v_k + beta * g_v)).norm() > 1e-9 * scale_v)
      throw std::invalid_argument(
          "lemma check: trajectory was not produced by sgd prediction steps with these schedules");

    double residual;
    if (which == LemmaKind::lemma1) {
      const double lhs = problem.loss(u_k, v_k) - problem.loss(saddle.u, v_k);
      const double rhs = ((u_k - saddle.u).squaredNorm() - (u_k1 - saddle.u).squaredNorm()) /
                             (2 * alpha) +
                         alpha / 2 * g_u.squaredNorm();
      residual = lhs - rhs;
    } else {
      const double lhs = problem.loss(u_k, saddle.v) - problem.loss(u_k, v_k);
      const double rhs = ((v_k - saddle.v).squaredNorm() - (v_k1 - saddle.v).squaredNorm()) /
                             (2 * beta) +
                         beta / 2 * g_v.squaredNorm() +
                         alpha * l_v * (g_u.squaredNorm() + (v_k - saddle.v).squaredNorm());
      residual = lhs - rhs;
    }
    report.residuals.push_back(residual);
    report.max_residual = std::max(report.max_residual, residual);
  }
  return report;
}

}  // namespace predsaddle
