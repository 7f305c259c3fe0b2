#include "predsaddle/solver.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace predsaddle {

Updater::Updater(Kind kind, double momentum, double beta1, double beta2, double epsilon)
    : kind_(kind), momentum_(momentum), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
  if (momentum < 0 || momentum >= 1) throw std::invalid_argument("momentum must lie in [0, 1)");
  if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1)
    throw std::invalid_argument("adam betas must lie in [0, 1)");
  if (!(epsilon > 0)) throw std::invalid_argument("adam epsilon must be positive");
}

Updater Updater::sgd() { return Updater(Kind::sgd, 0.0, 0.9, 0.999, 1e-8); }

Updater Updater::momentum_sgd(double momentum) {
  return Updater(Kind::momentum_sgd, momentum, 0.9, 0.999, 1e-8);
}

Updater Updater::adam(double beta1, double beta2, double epsilon) {
  return Updater(Kind::adam, 0.0, beta1, beta2, epsilon);
}

Vec adam_update(Vec x, const Vec& grad, double rate, Vec& m, Vec& v, std::int64_t t,
                double beta1, double beta2, double epsilon) {
  m = beta1 * m + (1 - beta1) * grad;
  v = beta2 * v + (1 - beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1 - std::pow(beta2, static_cast<double>(t));
  const Vec m_hat = m / bc1;
  const Vec v_hat = v / bc2;
  x.array() -= rate * m_hat.array() / (v_hat.array().sqrt() + epsilon);
  return x;
}

Vec Updater::step(const Vec& x, const Vec& grad, double rate, Direction dir) {
  if (grad.size() != x.size()) throw DimensionError("updater: gradient/parameter size mismatch");
  ++t_;
  const Vec g = dir == Direction::descent ? grad : Vec(-grad);
  switch (kind_) {
    case Kind::sgd:
      return x - rate * g;
    case Kind::momentum_sgd:
      if (m_.size() != x.size()) m_ = Vec::Zero(x.size());
      m_ = momentum_ * m_ + g;
      return x - rate * m_;
    case Kind::adam:
      if (m_.size() != x.size()) {
        m_ = Vec::Zero(x.size());
        v_ = Vec::Zero(x.size());
      }
      return adam_update(x, g, rate, m_, v_, t_, beta1_, beta2_, epsilon_);
  }
  throw std::logic_error("unreachable updater kind");
}

Vec predict_point(const Vec& u_next, const Vec& u_prev) {
  if (u_next.size() != u_prev.size()) throw DimensionError("predict_point: size mismatch");
  return 2.0 * u_next - u_prev;
}

SolverState SolverState::init(Vec u0, Vec v0, Updater updater_u, Updater updater_v) {
  SolverState st{std::move(u0), std::move(v0), Vec(), Vec(), 0, std::move(updater_u),
                 std::move(updater_v)};
  st.u_prev = st.u;
  st.v_prev = st.v;
  return st;
}

void step(const SaddleProblem& problem, SolverState& state, const Schedule& sched_u,
          const Schedule& sched_v, Rng& rng, const StepOptions& opts, StepTrace* trace) {
  const std::int64_t k_next = state.k + 1;
  const double alpha = sched_u.rate(k_next);
  const double beta = sched_v.rate(k_next);

  const Vec v_eval = opts.predict_dual && !opts.identity_extrapolation
                         ? predict_point(state.v, state.v_prev)
                         : state.v;

  const Vec g_u = problem.stochastic_grad_u(state.u, v_eval, rng);
  if (!g_u.allFinite()) throw DivergenceError(k_next);
  const Vec u_next = state.updater_u.step(state.u, g_u, alpha, Direction::descent);
  if (!u_next.allFinite()) throw DivergenceError(k_next);

  Vec u_eval = u_next;
  if (opts.predict_primal && !opts.identity_extrapolation)
    u_eval = predict_point(u_next, state.u);

  const Vec g_v = problem.stochastic_grad_v(u_eval, state.v, rng);
  if (!g_v.allFinite()) throw DivergenceError(k_next);
  const Vec v_next = state.updater_v.step(state.v, g_v, beta, Direction::ascent);
  if (!v_next.allFinite()) throw DivergenceError(k_next);

  if (trace) {
    trace->g_u = g_u;
    trace->g_v = g_v;
    trace->alpha = alpha;
    trace->beta = beta;
  }

  state.u_prev = state.u;
  state.v_prev = state.v;
  state.u = std::move(u_next);
  state.v = std::move(v_next);
  state.k = k_next;
}

void step_plain(const SaddleProblem& problem, SolverState& state, const Schedule& sched_u,
                const Schedule& sched_v, Rng& rng) {
  step(problem, state, sched_u, sched_v, rng, StepOptions{});
}

void step_predict(const SaddleProblem& problem, SolverState& state, const Schedule& sched_u,
                  const Schedule& sched_v, Rng& rng) {
  step(problem, state, sched_u, sched_v, rng, StepOptions{.predict_primal = true});
}

TrajectoryRecord run(const SaddleProblem& problem, const Vec& u0, const Vec& v0,
                     const RunOptions& opts) {
  if (opts.n_steps < 1) throw std::invalid_argument("run: n_steps must be >= 1");
  if (opts.record_every < 1) throw std::invalid_argument("run: record_every must be >= 1");
  if (u0.size() != problem.dim_u() || v0.size() != problem.dim_v())
    throw DimensionError("run: initial point does not match problem dimensions");

  SolverState st = SolverState::init(u0, v0, opts.updater_u, opts.updater_v);
  Rng rng(opts.seed);
  const auto sp = problem.saddle();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const StepOptions sopts{.predict_primal = opts.method == Method::predict,
                          .predict_dual = opts.predict_dual};

  TrajectoryRecord rec;
  Vec sum_u = Vec::Zero(u0.size());
  Vec sum_v = Vec::Zero(v0.size());
  if (opts.store_iterates) {
    rec.u_history.push_back(st.u);
    rec.v_history.push_back(st.v);
  }

  StepTrace trace;
  for (std::int64_t j = 1; j <= opts.n_steps; ++j) {
    try {
      step(problem, st, opts.sched_u, opts.sched_v, rng, sopts, &trace);
    } catch (const DivergenceError& e) {
      rec.collapsed = true;
      rec.collapse_step = e.step;
      break;
    }
    // The running average u_hat^l follows the analysis convention: it sums the
    // iterates each step started from, so the initial point is included and
    // the l-th post-step iterate is not.
    sum_u += st.u_prev;
    sum_v += st.v_prev;
    rec.steps_completed = j;
    if (opts.store_iterates) {
      rec.u_history.push_back(st.u);
      rec.v_history.push_back(st.v);
    }
    if (j % opts.record_every == 0 || j == opts.n_steps) {
      TrajectoryRow row;
      row.k = j;
      row.loss = problem.loss(st.u, st.v);
      row.alpha = trace.alpha;
      row.beta = trace.beta;
      if (sp) {
        row.err_u = (st.u - sp->u).norm();
        row.err_v = (st.v - sp->v).norm();
        const double l = static_cast<double>(j);
        row.gap_avg = primal_dual_gap(problem, Vec(sum_u / l), Vec(sum_v / l));
      } else {
        row.err_u = nan;
        row.err_v = nan;
        row.gap_avg = nan;
      }
      rec.rows.push_back(row);
    }
  }

  rec.u_final = st.u;
  rec.v_final = st.v;
  if (rec.steps_completed > 0) {
    rec.u_avg = sum_u / static_cast<double>(rec.steps_completed);
    rec.v_avg = sum_v / static_cast<double>(rec.steps_completed);
  } else {
    rec.u_avg = u0;
    rec.v_avg = v0;
  }
  return rec;
}

}  // namespace predsaddle
