#pragma once

#include <cstdint>
#include <vector>

#include "predsaddle/problem.hpp"
#include "predsaddle/schedule.hpp"
#include "predsaddle/updater.hpp"

namespace predsaddle {

enum class Method { plain, predict };

// Linear extrapolation of the primal iterate: 2*u_next - u_prev.
Vec predict_point(const Vec& u_next, const Vec& u_prev);

struct SolverState {
  Vec u, v;
  Vec u_prev;  // primal iterate before the most recent primal update
  Vec v_prev;  // dual counterpart, used only by the predict-dual variant
  std::int64_t k = 0;
  Updater updater_u;
  Updater updater_v;

  // Cold start: u_prev = u0, so the first extrapolation is 2*u1 - u0.
  static SolverState init(Vec u0, Vec v0, Updater updater_u, Updater updater_v);
};

struct StepOptions {
  bool predict_primal = false;
  // Evaluate the primal gradient at the extrapolated dual iterate as well.
  // Off by default; the plain and predict methods both leave v unextrapolated.
  bool predict_dual = false;
  // Testing hook: extrapolations become the identity, which must make the
  // predict step bit-identical to the plain step.
  bool identity_extrapolation = false;
};

// Gradients and rates consumed by one step, for callers that need them
// (rate-measurement, bound constants). Filled when passed non-null.
struct StepTrace {
  Vec g_u, g_v;
  double alpha = 0.0, beta = 0.0;
};

// One alternating step: primal descent from (u^k, v^k) with rate alpha_{k+1},
// then dual ascent evaluated at (u^{k+1}, v^k) — or at the extrapolated point
// 2*u^{k+1} - u^k when predicting — with rate beta_{k+1}.
// Throws DivergenceError (carrying the 1-indexed step) on a non-finite
// gradient or iterate; state is not committed in that case.
void step(const SaddleProblem& problem, SolverState& state, const Schedule& sched_u,
          const Schedule& sched_v, Rng& rng, const StepOptions& opts, StepTrace* trace = nullptr);

void step_plain(const SaddleProblem& problem, SolverState& state, const Schedule& sched_u,
                const Schedule& sched_v, Rng& rng);

void step_predict(const SaddleProblem& problem, SolverState& state, const Schedule& sched_u,
                  const Schedule& sched_v, Rng& rng);

struct TrajectoryRow {
  std::int64_t k = 0;
  double loss = 0.0;
  double err_u = 0.0;    // |u^k - u*|, NaN when the saddle is unknown
  double err_v = 0.0;    // |v^k - v*|
  double gap_avg = 0.0;  // P(u_hat^k, v_hat^k) of the running averages
  double alpha = 0.0;
  double beta = 0.0;
};

struct TrajectoryRecord {
  std::vector<TrajectoryRow> rows;
  bool collapsed = false;
  std::int64_t collapse_step = -1;  // 1-indexed step that failed
  std::int64_t steps_completed = 0;
  Vec u_final, v_final;
  // Running averages over the first steps_completed iterates, starting from
  // the initial point: u_hat^l = (1/l) * sum_{k=1..l} u^k with u^1 = u0.
  Vec u_avg, v_avg;
  // All iterates x_0..x_n when RunOptions::store_iterates is set.
  std::vector<Vec> u_history, v_history;
};

struct RunOptions {
  Method method = Method::plain;
  Schedule sched_u = Schedule::constant(0.1);
  Schedule sched_v = Schedule::constant(0.1);
  Updater updater_u = Updater::sgd();
  Updater updater_v = Updater::sgd();
  std::int64_t n_steps = 1;
  std::int64_t record_every = 1;
  std::uint64_t seed = 0;
  bool store_iterates = false;
  bool predict_dual = false;
};

// Driver around the alternating step. Returns the partial trajectory with the
// collapse flag set if any gradient or iterate turns non-finite.
TrajectoryRecord run(const SaddleProblem& problem, const Vec& u0, const Vec& v0,
                     const RunOptions& opts);

}  // namespace predsaddle
