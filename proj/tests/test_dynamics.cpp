#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "predsaddle/dynamics.hpp"

using namespace predsaddle;

namespace {

Mat scalar_mat(double k) {
  Mat m(1, 1);
  m << k;
  return m;
}

Vec vec1(double x) {
  Vec v(1);
  v << x;
  return v;
}

Mat random_sym(Eigen::Index n, Rng& rng) {
  Mat a(n, n);
  for (Eigen::Index i = 0; i < n * n; ++i) a(i) = rng.normal();
  return (a + a.transpose()) / 2;
}

// Test-side RK4 on x' = f(x) with fixed step.
template <typename F>
Vec rk4(F f, Vec x, double t_end, double h) {
  double t = 0;
  while (t < t_end - h / 2) {
    const Vec k1 = f(x);
    const Vec k2 = f(Vec(x + h / 2 * k1));
    const Vec k3 = f(Vec(x + h / 2 * k2));
    const Vec k4 = f(Vec(x + h * k3));
    x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return x;
}

}  // namespace

TEST_CASE("jacobi agrees with hand-diagonalizable cases") {
  SUBCASE("identity coupling") {
    const ModeDecomposition dec = decompose(scalar_mat(1), 0.1, 0.1);
    CHECK(dec.sigma[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(dec.U(0, 0)) == doctest::Approx(1.0));
  }
  SUBCASE("asymmetric rates rescale the spectrum") {
    const ModeDecomposition dec = decompose(scalar_mat(2), 0.1, 0.2);
    CHECK(dec.sigma[0] == doctest::Approx(8.0).epsilon(1e-13));
  }
  SUBCASE("diagonal coupling sorts modes descending") {
    Mat K = Mat::Zero(2, 2);
    K(0, 0) = 1;
    K(1, 1) = 3;
    const ModeDecomposition dec = decompose(K, 0.1, 0.1);
    CHECK(dec.sigma[0] == doctest::Approx(9.0).epsilon(1e-13));
    CHECK(dec.sigma[1] == doctest::Approx(1.0).epsilon(1e-13));
    // eigenvector of sigma=9 is e2 up to sign
    CHECK(std::abs(dec.U(1, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(dec.U(0, 1)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("jacobi decomposition invariants on random matrices") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    Mat K(4, 3);
    for (Eigen::Index i = 0; i < K.size(); ++i) K(i) = rng.normal();
    const ModeDecomposition dec = decompose(K, 0.05, 0.1);
    const Mat id = dec.U.transpose() * dec.U - Mat::Identity(3, 3);
    CHECK(id.norm() <= 1e-10);
    const Mat s = 2.0 * (K.transpose() * K);
    const Mat rec = dec.U * dec.sigma.asDiagonal() * dec.U.transpose();
    CHECK((rec - s).norm() <= 1e-10 * std::max(1.0, s.norm()));
    for (Eigen::Index i = 0; i + 1 < dec.sigma.size(); ++i)
      CHECK(dec.sigma[i] >= dec.sigma[i + 1]);
    for (Eigen::Index i = 0; i < dec.sigma.size(); ++i) CHECK(dec.sigma[i] >= 0);
  }
}

TEST_CASE("jacobi handles plain symmetric eigenproblems") {
  Rng rng(23);
  const Mat s = random_sym(5, rng);
  const JacobiResult eig = jacobi_eigh(s);
  const Mat rec =
      eig.eigenvectors * eig.eigenvalues.asDiagonal() * eig.eigenvectors.transpose();
  CHECK((rec - s).norm() <= 1e-10 * std::max(1.0, s.norm()));
}

TEST_CASE("undamped solution: cosine and sine modes") {
  SUBCASE("u0=1, v0=0 gives cos(t)") {
    const auto sol = undamped_solution(scalar_mat(1), 0.1, 0.1, vec1(1), vec1(0));
    for (double t : {0.0, 0.3, 1.0, 2.5, 7.0})
      CHECK(sol.evaluate(t)[0] == doctest::Approx(std::cos(t)).epsilon(1e-12));
  }
  SUBCASE("u0=0, v0=1 gives -sin(t)") {
    const auto sol = undamped_solution(scalar_mat(1), 0.1, 0.1, vec1(0), vec1(1));
    for (double t : {0.0, 0.3, 1.0, 2.5, 7.0})
      CHECK(sol.evaluate(t)[0] == doctest::Approx(-std::sin(t)).epsilon(1e-12));
  }
  SUBCASE("rest at the saddle stays at rest") {
    const auto sol = undamped_solution(scalar_mat(1), 0.1, 0.1, vec1(0), vec1(0));
    CHECK(sol.evaluate(3.7).norm() == 0.0);
  }
}

TEST_CASE("oscillator solutions match the initial conditions") {
  Rng rng(31);
  Mat K(3, 3);
  for (Eigen::Index i = 0; i < 9; ++i) K(i) = rng.normal();
  Vec u0(3), v0(3);
  for (int i = 0; i < 3; ++i) {
    u0[i] = rng.normal();
    v0[i] = rng.normal();
  }
  for (bool damped : {false, true}) {
    const auto sol = damped ? damped_solution(K, 0.05, 0.05, u0, v0)
                            : undamped_solution(K, 0.05, 0.05, u0, v0);
    CHECK((sol.evaluate(0) - u0).norm() <= 1e-10);
    const double h = 1e-6;
    const Vec udot0 = (sol.evaluate(h) - sol.evaluate(-h)) / (2 * h);
    const Vec expected = -(K.transpose() * v0);
    CHECK((udot0 - expected).norm() <= 1e-8 * std::max(1.0, expected.norm()));
  }
}

TEST_CASE("damped solution: decay rate and frequency for the unit mode") {
  const auto sol = damped_solution(scalar_mat(1), 0.1, 0.1, vec1(1), vec1(0));
  REQUIRE(sol.modes.size() == 1);
  const auto& m = sol.modes[0];
  CHECK(m.kind == OscillatorMode::Kind::damped_trig);
  CHECK(m.damping == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(m.omega == doctest::Approx(std::sqrt(1 - 0.0025)).epsilon(1e-14));
}

TEST_CASE("damped solution converges to undamped as alpha -> 0") {
  const double alpha = 1e-3;
  const auto damped = damped_solution(scalar_mat(1), alpha, alpha, vec1(1), vec1(0.5));
  const auto undamped = undamped_solution(scalar_mat(1), alpha, alpha, vec1(1), vec1(0.5));
  double max_diff = 0;
  for (double t = 0; t <= 10.0; t += 0.05)
    max_diff = std::max(max_diff, std::abs(damped.evaluate(t)[0] - undamped.evaluate(t)[0]));
  CHECK(max_diff <= 10 * alpha);
}

TEST_CASE("rank-deficient coupling yields flagged affine modes") {
  Mat K = Mat::Zero(2, 2);
  K(0, 0) = 1;
  const Vec u0 = Vec::Ones(2);
  const Vec v0 = Vec::Ones(2);
  for (bool damped : {false, true}) {
    const auto sol = damped ? damped_solution(K, 0.1, 0.1, u0, v0)
                            : undamped_solution(K, 0.1, 0.1, u0, v0);
    REQUIRE(sol.affine_modes.size() == 1);
    // The zero mode moves affinely: z(t) = z0 + zdot0 * t.
    const auto& m = sol.modes[static_cast<size_t>(sol.affine_modes[0])];
    CHECK(m.kind == OscillatorMode::Kind::affine);
    CHECK(m.eval(2.0) == doctest::Approx(m.z0 + 2.0 * m.zdot0));
  }
}

TEST_CASE("overdamped modes use the real-exponential pair") {
  // alpha*sigma/2 > sqrt(sigma): sigma = 100, alpha = 0.3 -> d = 15 > 10.
  const auto sol = damped_solution(scalar_mat(10), 0.3, 0.3, vec1(1), vec1(0.2));
  REQUIRE(sol.modes.size() == 1);
  CHECK(sol.modes[0].kind == OscillatorMode::Kind::real_exp);
  CHECK((sol.evaluate(0) - vec1(1)).norm() <= 1e-12);
  // decays monotonically once both exponentials dominate
  CHECK(std::abs(sol.evaluate(5.0)[0]) < 1.0);
}

TEST_CASE("discrete update maps: hand-checked spectra") {
  SUBCASE("plain: unit determinant and unit-modulus eigenvalues") {
    const auto spec = discrete_map(Method::plain, 1.0, 0.1, 0.1);
    const auto& m = spec.modes[0];
    CHECK(std::abs(m.det - 1.0) <= 1e-15);
    CHECK(m.M.trace() == doctest::Approx(1.99).epsilon(1e-15));
    CHECK(std::abs(std::abs(m.lambda1) - 1.0) <= 1e-15);
    CHECK(std::abs(std::abs(m.lambda2) - 1.0) <= 1e-15);
  }
  SUBCASE("predict: determinant 1 - alpha*beta*kappa^2") {
    const auto spec = discrete_map(Method::predict, 1.0, 0.1, 0.1);
    const auto& m = spec.modes[0];
    CHECK(m.det == doctest::Approx(0.99).epsilon(1e-15));
    CHECK(m.M.trace() == doctest::Approx(1.98).epsilon(1e-15));
    CHECK(spec.spectral_radius == doctest::Approx(std::sqrt(0.99)).epsilon(1e-12));
  }
  SUBCASE("alpha=0 freezes the primal row; unit modulus for both methods") {
    for (Method m : {Method::plain, Method::predict}) {
      const auto spec = discrete_map(m, 1.0, 0.0, 0.1);
      CHECK(spec.modes[0].M(0, 0) == 1.0);
      CHECK(spec.modes[0].M(0, 1) == 0.0);
      CHECK(spec.spectral_radius == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("area preservation and contraction across a parameter sweep") {
  for (double kappa : {0.1, 1.0, 10.0}) {
    for (double alpha : {1e-3, 1e-2, 1e-1}) {
      for (double beta : {1e-3, 1e-2, 1e-1}) {
        const auto plain = discrete_map(Method::plain, kappa, alpha, beta);
        CHECK(std::abs(plain.modes[0].det - 1.0) <= 1e-12);

        const auto pred = discrete_map(Method::predict, kappa, alpha, beta);
        const double s = alpha * beta * kappa * kappa;
        CHECK(std::abs(pred.modes[0].det - (1.0 - s)) <= 1e-12);
        if (pred.modes[0].lambda1.imag() != 0.0)
          CHECK(pred.spectral_radius == doctest::Approx(std::sqrt(1.0 - s)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("matrix update-map spectrum covers every singular-value mode") {
  Mat K = Mat::Zero(2, 2);
  K(0, 0) = 1;
  K(1, 1) = 3;
  const auto spec = update_map_spectrum(Method::predict, K, 0.01, 0.01);
  REQUIRE(spec.modes.size() == 2);
  CHECK(spec.modes[0].kappa == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(spec.modes[1].kappa == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spec.modes[0].det == doctest::Approx(1 - 1e-4 * 9).epsilon(1e-12));
}

TEST_CASE("plain orbit radius is conserved in the eigenbasis over 1e4 steps") {
  const double a = 0.1, b = 0.1, kappa = 1.0;
  const auto spec = discrete_map(Method::plain, kappa, a, b);
  const double p = spec.modes[0].lambda1.real();
  const double q = spec.modes[0].lambda1.imag();
  REQUIRE(q != 0.0);
  // Real 2x2 canonical basis B = [Re w, Im w] for eigenvector w = (a*kappa, 1 - lambda).
  Eigen::Matrix2d basis;
  basis << a * kappa, 0.0, 1.0 - p, -q;
  const Eigen::Matrix2d basis_inv = basis.inverse();

  Eigen::Vector2d x(1.0, 0.0);
  const double r0 = (basis_inv * x).norm();
  double max_dev = 0;
  for (int k = 0; k < 10000; ++k) {
    x = spec.modes[0].M * x;
    max_dev = std::max(max_dev, std::abs((basis_inv * x).norm() - r0));
  }
  CHECK(max_dev <= 1e-9 * r0);
}

TEST_CASE("predict iterates contract inside the conditioned envelope") {
  const auto spec = discrete_map(Method::predict, 1.0, 0.1, 0.1);
  const double rho = spec.spectral_radius;
  const double p = spec.modes[0].lambda1.real();
  const double q = spec.modes[0].lambda1.imag();
  Eigen::Matrix2d basis;
  basis << 0.1, 0.0, 1.0 - p, -q;
  const Eigen::JacobiSVD<Eigen::Matrix2d> svd(basis);
  const double cond = svd.singularValues()(0) / svd.singularValues()(1);

  Eigen::Vector2d x(1.0, 0.0);
  for (int k = 1; k <= 2000; ++k) {
    x = spec.modes[0].M * x;
    CHECK(x.norm() <= cond * std::pow(rho, k) * 1.0 + 1e-12);
  }
}

TEST_CASE("empirical orbit period matches 2*pi/sqrt(sigma) within 2%") {
  const double alpha = 0.01;
  const auto spec = discrete_map(Method::plain, 1.0, alpha, alpha);
  Eigen::Vector2d x(1.0, 0.0);
  // count upward zero crossings of u over many periods
  std::vector<double> crossings;
  double prev_u = x(0);
  const int n_steps = 200000;
  for (int k = 1; k <= n_steps; ++k) {
    x = spec.modes[0].M * x;
    if (prev_u < 0 && x(0) >= 0) {
      const double frac = -prev_u / (x(0) - prev_u);
      crossings.push_back((static_cast<double>(k - 1) + frac) * alpha);
    }
    prev_u = x(0);
  }
  REQUIRE(crossings.size() >= 10);
  const double period =
      (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
  CHECK(std::abs(period - 2 * std::numbers::pi) <= 0.02 * 2 * std::numbers::pi);
}

TEST_CASE("closed forms agree with direct RK4 integration on random 3x3 coupling") {
  Rng rng(77);
  Mat K(3, 3);
  for (Eigen::Index i = 0; i < 9; ++i) K(i) = rng.normal();
  Vec u0(3), v0(3);
  for (int i = 0; i < 3; ++i) {
    u0[i] = rng.normal();
    v0[i] = rng.normal();
  }
  const double alpha = 0.05, beta = 0.1;
  const Mat S = (beta / alpha) * (K.transpose() * K);

  SUBCASE("undamped") {
    const auto sol = undamped_solution(K, alpha, beta, u0, v0);
    // first-order system in (x, w = xdot): w' = -S x
    auto f = [&](const Vec& state) {
      Vec d(6);
      d.head(3) = state.tail(3);
      d.tail(3) = -(S * state.head(3));
      return d;
    };
    Vec state(6);
    state.head(3) = u0;
    state.tail(3) = -(K.transpose() * v0);
    for (double t : {2.5, 10.0}) {
      state = rk4(f, state, t == 2.5 ? 2.5 : 7.5, 1e-4);
      CHECK((sol.evaluate(t) - state.head(3)).norm() <= 1e-6);
    }
  }
  SUBCASE("damped") {
    const auto sol = damped_solution(K, alpha, beta, u0, v0);
    auto f = [&](const Vec& state) {
      Vec d(6);
      d.head(3) = state.tail(3);
      d.tail(3) = -(S * (state.head(3) + alpha * state.tail(3)));
      return d;
    };
    Vec state(6);
    state.head(3) = u0;
    state.tail(3) = -(K.transpose() * v0);
    for (double t : {2.5, 10.0}) {
      state = rk4(f, state, t == 2.5 ? 2.5 : 7.5, 1e-4);
      CHECK((sol.evaluate(t) - state.head(3)).norm() <= 1e-6);
    }
  }
}

TEST_CASE("discrete trajectories track the ODE at first order") {
  const Mat K = scalar_mat(1);
  const Vec u0 = vec1(1), v0 = vec1(0);
  for (Method m : {Method::plain, Method::predict}) {
    const double e_full = trajectory_vs_ode(m, K, 1e-2, 1e-2, u0, v0, 10.0);
    const double e_half = trajectory_vs_ode(m, K, 5e-3, 5e-3, u0, v0, 10.0);
    CHECK(e_full <= 0.1);
    const double ratio = e_full / e_half;
    CHECK(ratio >= 1.6);
    CHECK(ratio <= 2.6);
  }
}

TEST_CASE("one-step tracking error is second order in alpha") {
  const Mat K = scalar_mat(1);
  const double alpha = 1e-3;
  for (Method m : {Method::plain, Method::predict}) {
    const double err = trajectory_vs_ode(m, K, alpha, alpha, vec1(1), vec1(0.5), alpha);
    CHECK(err <= 10 * alpha * alpha);
  }
}
