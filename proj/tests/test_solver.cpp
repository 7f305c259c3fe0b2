#include <doctest.h>

#include <cmath>
#include <limits>

#include "predsaddle/solver.hpp"

using namespace predsaddle;

namespace {

Vec vec1(double x) {
  Vec v(1);
  v << x;
  return v;
}

ProblemPtr unit_bilinear() {
  Mat K(1, 1);
  K << 1;
  return make_bilinear(K);
}

// Emits +inf gradient for u once fail_at is reached.
struct FaultyProblem final : SaddleProblem {
  explicit FaultyProblem(std::int64_t fail_at) : fail_at(fail_at) {}
  Eigen::Index dim_u() const override { return 1; }
  Eigen::Index dim_v() const override { return 1; }
  double loss(const Vec& u, const Vec& v) const override { return u[0] * v[0]; }
  Vec grad_u(const Vec&, const Vec& v) const override {
    ++calls;
    if (calls >= fail_at) return vec1(std::numeric_limits<double>::infinity());
    return v;
  }
  Vec grad_v(const Vec& u, const Vec&) const override { return u; }
  std::optional<SaddlePoint> saddle() const override {
    return SaddlePoint{Vec::Zero(1), Vec::Zero(1)};
  }
  std::int64_t fail_at;
  mutable std::int64_t calls = 0;
};

}  // namespace

TEST_CASE("schedules") {
  const Schedule c = Schedule::constant(0.1);
  CHECK(c.rate(1) == 0.1);
  CHECK(c.rate(1000000) == 0.1);

  const Schedule inv = Schedule::inverse_sqrt(0.5);
  CHECK(inv.rate(1) == 0.5);
  CHECK(inv.rate(4) == 0.25);
  double prev = inv.rate(1);
  for (std::int64_t k = 2; k <= 2000; ++k) {
    CHECK(inv.rate(k) < prev);
    prev = inv.rate(k);
  }
  CHECK_THROWS_AS(inv.rate(0), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::constant(-1.0), std::invalid_argument);
}

TEST_CASE("inverse-sqrt partial sums stay below 2*base*sqrt(l)") {
  const double base = 0.5;
  const Schedule inv = Schedule::inverse_sqrt(base);
  double sum = 0;
  for (std::int64_t k = 1; k <= 1000000; ++k) {
    sum += inv.rate(k);
    if (k <= 100 || k % 9973 == 0 || k == 1000000)
      CHECK(sum <= base * 2 * std::sqrt(static_cast<double>(k)));
  }
}

TEST_CASE("plain step hand values on the unit bilinear saddle") {
  const auto p = unit_bilinear();
  SolverState st = SolverState::init(vec1(1), vec1(0), Updater::sgd(), Updater::sgd());
  Rng rng(0);
  const Schedule sched = Schedule::constant(0.1);

  step_plain(*p, st, sched, sched, rng);
  CHECK(st.u[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(st.v[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(st.k == 1);
  CHECK(st.u_prev[0] == 1.0);

  step_plain(*p, st, sched, sched, rng);
  CHECK(st.u[0] == doctest::Approx(0.99).epsilon(1e-15));
  CHECK(st.v[0] == doctest::Approx(0.199).epsilon(1e-15));
  CHECK(st.k == 2);
}

TEST_CASE("predict step hand values on the unit bilinear saddle") {
  const auto p = unit_bilinear();
  SolverState st = SolverState::init(vec1(1), vec1(0), Updater::sgd(), Updater::sgd());
  Rng rng(0);
  const Schedule sched = Schedule::constant(0.1);

  step_predict(*p, st, sched, sched, rng);
  CHECK(st.u[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(st.v[0] == doctest::Approx(0.1).epsilon(1e-15));

  step_predict(*p, st, sched, sched, rng);
  CHECK(st.u[0] == doctest::Approx(0.99).epsilon(1e-15));
  CHECK(st.v[0] == doctest::Approx(0.198).epsilon(1e-15));
}

TEST_CASE("zero step size leaves the state unchanged except the counter") {
  const auto p = unit_bilinear();
  SolverState st = SolverState::init(vec1(1), vec1(2), Updater::sgd(), Updater::sgd());
  Rng rng(0);
  const Schedule zero = Schedule::constant(0.0);
  step_plain(*p, st, zero, zero, rng);
  CHECK(st.u[0] == 1.0);
  CHECK(st.v[0] == 2.0);
  CHECK(st.k == 1);
}

TEST_CASE("zero coupling keeps iterates constant under prediction") {
  const auto p = make_bilinear(Mat::Zero(2, 2));
  Vec u0(2), v0(2);
  u0 << 1, -2;
  v0 << 3, 4;
  SolverState st = SolverState::init(u0, v0, Updater::sgd(), Updater::sgd());
  Rng rng(0);
  const Schedule sched = Schedule::constant(0.1);
  for (int i = 0; i < 5; ++i) step_predict(*p, st, sched, sched, rng);
  CHECK((st.u - u0).norm() == 0.0);
  CHECK((st.v - v0).norm() == 0.0);
}

TEST_CASE("predict_point") {
  CHECK(predict_point(vec1(1.0), vec1(1.0))[0] == 1.0);
  CHECK(predict_point(vec1(0.99), vec1(1.0))[0] == doctest::Approx(0.98).epsilon(1e-15));
  CHECK(predict_point(vec1(0.7), Vec::Zero(1))[0] == doctest::Approx(1.4));
  CHECK_THROWS_AS(predict_point(Vec::Zero(2), Vec::Zero(3)), DimensionError);
}

TEST_CASE("cold-start extrapolation: ubar1 - u1 equals u1 - u0") {
  const auto p = unit_bilinear();
  SolverState st = SolverState::init(vec1(1), vec1(0.37), Updater::sgd(), Updater::sgd());
  Rng rng(0);
  const Schedule sched = Schedule::constant(0.1);
  step_predict(*p, st, sched, sched, rng);
  const Vec ubar = predict_point(st.u, st.u_prev);
  CHECK((ubar - st.u).norm() == doctest::Approx((st.u - st.u_prev).norm()).epsilon(1e-15));
}

TEST_CASE("adam first step moves by rate*g/(|g|+eps)") {
  Updater adam = Updater::adam();
  Vec x(2), g(2);
  x << 0, 0;
  g << 3.0, -0.25;
  const Vec x1 = adam.step(x, g, 0.001, Direction::descent);
  for (int i = 0; i < 2; ++i)
    CHECK(x1[i] == doctest::Approx(-0.001 * g[i] / (std::abs(g[i]) + 1e-8)).epsilon(1e-12));
}

TEST_CASE("adam with zero gradients never moves") {
  Updater adam = Updater::adam();
  Vec x(3);
  x << 1, 2, 3;
  for (int i = 0; i < 10; ++i) x = adam.step(x, Vec::Zero(3), 0.001, Direction::descent);
  CHECK(x[0] == 1.0);
  CHECK(x[1] == 2.0);
  CHECK(x[2] == 3.0);
}

TEST_CASE("adam with zero betas and huge epsilon is a scaled gradient step") {
  Updater adam = Updater::adam(0.0, 0.0, 1e12);
  Vec x(1);
  x << 0;
  Vec g(1);
  g << 2.5;
  const Vec x1 = adam.step(x, g, 1.0, Direction::descent);
  CHECK(x1[0] == doctest::Approx(-2.5 / (2.5 + 1e12)).epsilon(1e-9));
}

TEST_CASE("ascent equals descent on the negated gradient, bitwise") {
  Rng rng(9);
  for (auto make : {+[] { return Updater::sgd(); }, +[] { return Updater::momentum_sgd(0.9); },
                    +[] { return Updater::adam(); }}) {
    Updater a = make(), b = make();
    Vec x(4);
    for (int i = 0; i < 4; ++i) x[i] = rng.normal();
    for (int s = 0; s < 5; ++s) {
      Vec g(4);
      for (int i = 0; i < 4; ++i) g[i] = rng.normal();
      const Vec xa = a.step(x, g, 0.05, Direction::ascent);
      const Vec xb = b.step(x, Vec(-g), 0.05, Direction::descent);
      CHECK((xa - xb).lpNorm<Eigen::Infinity>() == 0.0);
      x = xa;
    }
  }
}

TEST_CASE("updater validation") {
  CHECK_THROWS_AS(Updater::momentum_sgd(1.0), std::invalid_argument);
  CHECK_THROWS_AS(Updater::adam(1.0, 0.999), std::invalid_argument);
  CHECK_THROWS_AS(Updater::adam(0.9, 0.999, 0.0), std::invalid_argument);
}

TEST_CASE("identity extrapolation makes predict bit-identical to plain") {
  Mat K(2, 2);
  K << 1, 0.5, -0.25, 2;
  const auto p = make_bilinear(K);
  for (auto make : {+[] { return Updater::sgd(); }, +[] { return Updater::momentum_sgd(0.5); },
                    +[] { return Updater::adam(); }}) {
    SolverState a = SolverState::init(Vec::Ones(2), Vec::Ones(2), make(), make());
    SolverState b = SolverState::init(Vec::Ones(2), Vec::Ones(2), make(), make());
    Rng ra(4), rb(4);
    const Schedule sched = Schedule::constant(0.05);
    for (int s = 0; s < 20; ++s) {
      step(*p, a, sched, sched, ra, StepOptions{});
      step(*p, b, sched, sched, rb,
           StepOptions{.predict_primal = true, .identity_extrapolation = true});
      CHECK((a.u - b.u).lpNorm<Eigen::Infinity>() == 0.0);
      CHECK((a.v - b.v).lpNorm<Eigen::Infinity>() == 0.0);
    }
  }
}

TEST_CASE("half-step mirror: swapping roles on the negated-transpose problem") {
  // With constant rates and plain SGD, running on L~(a,b) = -L(b,a) from
  // (v0, u1) reproduces (v_k, u_{k+1}) of the original run exactly.
  Mat K(2, 3);
  K << 1, -0.5, 0.25, 2, 0.75, -1;
  const auto p = make_bilinear(K);
  const auto mirrored = make_bilinear(Mat(-K.transpose()));
  const Schedule sa = Schedule::constant(0.07);
  const Schedule sb = Schedule::constant(0.03);
  Rng rng(0);

  Vec u0 = Vec::Ones(3), v0 = Vec::Ones(2);
  SolverState orig = SolverState::init(u0, v0, Updater::sgd(), Updater::sgd());
  step_plain(*p, orig, sa, sb, rng);

  SolverState mirror = SolverState::init(orig.v_prev, orig.u, Updater::sgd(), Updater::sgd());
  // mirror starts from (v0, u1)
  for (int s = 0; s < 10; ++s) {
    const Vec expect_v = orig.v;
    step_plain(*p, orig, sa, sb, rng);
    step_plain(*mirrored, mirror, sb, sa, rng);
    CHECK((mirror.u - expect_v).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((mirror.v - orig.u).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("predict-dual flag extrapolates the dual evaluation point") {
  const auto p = unit_bilinear();
  const Schedule sched = Schedule::constant(0.1);
  SolverState with_flag = SolverState::init(vec1(1), vec1(0.5), Updater::sgd(), Updater::sgd());
  SolverState without = SolverState::init(vec1(1), vec1(0.5), Updater::sgd(), Updater::sgd());
  Rng ra(0), rb(0);
  const StepOptions dual_opts{.predict_primal = true, .predict_dual = true};
  const StepOptions plain_opts{.predict_primal = true};

  // Cold start: v_prev = v0, so the first extrapolation is the identity.
  step(*p, with_flag, sched, sched, ra, dual_opts);
  step(*p, without, sched, sched, rb, plain_opts);
  CHECK(with_flag.u[0] == without.u[0]);
  CHECK(with_flag.v[0] == without.v[0]);

  // From the second step on, the primal gradient sees 2*v - v_prev.
  step(*p, with_flag, sched, sched, ra, dual_opts);
  step(*p, without, sched, sched, rb, plain_opts);
  const double v_bar = 2 * without.v_prev[0] - 0.5;
  CHECK(with_flag.u[0] == doctest::Approx(without.u_prev[0] - 0.1 * v_bar).epsilon(1e-15));
  CHECK(with_flag.u[0] != without.u[0]);
}

TEST_CASE("run: plain orbit stays bounded over 1e4 steps") {
  const auto p = unit_bilinear();
  RunOptions opts;
  opts.method = Method::plain;
  opts.n_steps = 10000;
  opts.record_every = 1000;
  const TrajectoryRecord rec = run(*p, vec1(1), vec1(0), opts);
  CHECK_FALSE(rec.collapsed);
  const double init_norm = 1.0;
  for (const auto& row : rec.rows) {
    const double norm = std::hypot(row.err_u, row.err_v);
    CHECK(norm >= 0.9 * init_norm);
    CHECK(norm <= 1.2 * init_norm);
  }
}

TEST_CASE("run: predict contracts to 1e-3 within 2000 steps") {
  const auto p = unit_bilinear();
  RunOptions opts;
  opts.method = Method::predict;
  opts.n_steps = 2000;
  opts.record_every = 2000;
  const TrajectoryRecord rec = run(*p, vec1(1), vec1(0), opts);
  CHECK_FALSE(rec.collapsed);
  CHECK(std::hypot(rec.u_final.norm(), rec.v_final.norm()) <= 1e-3);
}

TEST_CASE("run with n_steps=1 matches a single step exactly") {
  const auto p = unit_bilinear();
  RunOptions opts;
  opts.method = Method::predict;
  opts.n_steps = 1;
  const TrajectoryRecord rec = run(*p, vec1(1), vec1(0), opts);
  CHECK(rec.rows.size() == 1);
  CHECK(rec.rows[0].k == 1);

  SolverState st = SolverState::init(vec1(1), vec1(0), Updater::sgd(), Updater::sgd());
  Rng rng(0);
  step_predict(*p, st, opts.sched_u, opts.sched_v, rng);
  CHECK(rec.u_final[0] == st.u[0]);
  CHECK(rec.v_final[0] == st.v[0]);
}

TEST_CASE("running averages match the stored iterates") {
  const auto p = unit_bilinear();
  RunOptions opts;
  opts.method = Method::predict;
  opts.n_steps = 137;
  opts.record_every = 137;
  opts.store_iterates = true;
  const TrajectoryRecord rec = run(*p, vec1(1), vec1(0.5), opts);
  REQUIRE(rec.u_history.size() == 138);
  Vec sum_u = Vec::Zero(1), sum_v = Vec::Zero(1);
  for (std::int64_t k = 0; k < opts.n_steps; ++k) {
    sum_u += rec.u_history[static_cast<size_t>(k)];
    sum_v += rec.v_history[static_cast<size_t>(k)];
  }
  CHECK((rec.u_avg - sum_u / 137.0).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK((rec.v_avg - sum_v / 137.0).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("collapse: infinite gradient at step k yields exactly k-1 rows") {
  const std::int64_t fail_at = 7;
  const FaultyProblem p(fail_at);
  RunOptions opts;
  opts.method = Method::plain;
  opts.n_steps = 100;
  opts.record_every = 1;
  const TrajectoryRecord rec = run(p, vec1(1), vec1(1), opts);
  CHECK(rec.collapsed);
  CHECK(rec.collapse_step == fail_at);
  CHECK(rec.rows.size() == static_cast<size_t>(fail_at - 1));
  CHECK(rec.steps_completed == fail_at - 1);
}

TEST_CASE("step throws DivergenceError carrying the failing step index") {
  const FaultyProblem p(1);
  SolverState st = SolverState::init(vec1(1), vec1(1), Updater::sgd(), Updater::sgd());
  Rng rng(0);
  const Schedule sched = Schedule::constant(0.1);
  try {
    step_plain(p, st, sched, sched, rng);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.step == 1);
  }
  CHECK(st.k == 0);  // state not committed
}
