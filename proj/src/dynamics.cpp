#include "predsaddle/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace predsaddle {

JacobiResult jacobi_eigh(const Mat& symmetric, double tol, int max_sweeps) {
  const Eigen::Index n = symmetric.rows();
  if (symmetric.cols() != n) throw DimensionError("jacobi_eigh: matrix must be square");
  Mat a = symmetric;
  Mat u = Mat::Identity(n, n);
  const double stop = tol * std::max(1.0, symmetric.norm());

  auto off_norm = [&]() {
    double s = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) s += 2 * a(p, q) * a(p, q);
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > stop) {
    if (++sweep > max_sweeps)
      throw NumericalError("jacobi_eigh: no convergence within sweep budget");
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1);
        const double s = t * c;
        const double tau = s / (1 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0;
        a(q, p) = 0;
        for (Eigen::Index r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double arp = a(r, p), arq = a(r, q);
            a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
            a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
          }
          const double urp = u(r, p), urq = u(r, q);
          u(r, p) = urp - s * (urq + tau * urp);
          u(r, q) = urq + s * (urp - tau * urq);
        }
      }
    }
  }
  return JacobiResult{std::move(u), a.diagonal(), sweep};
}

ModeDecomposition decompose(const Mat& K, double alpha, double beta) {
  if (!(alpha > 0) || !(beta > 0)) throw std::invalid_argument("decompose: step sizes must be positive");
  Mat s = (beta / alpha) * (K.transpose() * K);
  s = ((s + s.transpose()) / 2).eval();
  JacobiResult eig = jacobi_eigh(s);

  const Eigen::Index n = eig.eigenvalues.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index i, Eigen::Index j) { return eig.eigenvalues[i] > eig.eigenvalues[j]; });

  ModeDecomposition dec;
  dec.alpha = alpha;
  dec.beta = beta;
  dec.sigma.resize(n);
  dec.U.resize(n, n);
  const double floor_tol = 1e-12 * std::max(1.0, std::abs(eig.eigenvalues.maxCoeff()));
  for (Eigen::Index i = 0; i < n; ++i) {
    double lam = eig.eigenvalues[order[i]];
    if (lam < 0 && lam > -floor_tol) lam = 0;  // K^T K is PSD; clip rounding
    dec.sigma[i] = lam;
    dec.U.col(i) = eig.eigenvectors.col(order[i]);
  }
  return dec;
}

double OscillatorMode::eval(double t) const {
  switch (kind) {
    case Kind::trig:
      return amplitude * std::cos(omega * t + phase);
    case Kind::damped_trig:
      return amplitude * std::exp(-damping * t) * std::sin(omega * t + phase);
    case Kind::real_exp:
      return c1 * std::exp(lambda1 * t) + c2 * std::exp(lambda2 * t);
    case Kind::critical:
      return (c1 + c2 * t) * std::exp(lambda1 * t);
    case Kind::affine:
      return z0 + zdot0 * t;
  }
  return 0.0;
}

Vec OscillatorSolution::evaluate(double t) const {
  Vec z(static_cast<Eigen::Index>(modes.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = modes[static_cast<size_t>(i)].eval(t);
  return U * z;
}

namespace {

struct ModeInit {
  ModeDecomposition dec;
  Vec z0, zdot0;
};

ModeInit mode_initial_conditions(const Mat& K, double alpha, double beta, const Vec& u0,
                                 const Vec& v0) {
  if (u0.size() != K.cols() || v0.size() != K.rows())
    throw DimensionError("oscillator solution: initial point does not match K");
  ModeInit init{decompose(K, alpha, beta), Vec(), Vec()};
  init.z0 = init.dec.U.transpose() * u0;
  init.zdot0 = init.dec.U.transpose() * (-(K.transpose() * v0));
  return init;
}

bool is_zero_mode(double sigma, double sigma_max) {
  return sigma <= 1e-12 * std::max(1.0, sigma_max);
}

}  // namespace

OscillatorSolution undamped_solution(const Mat& K, double alpha, double beta, const Vec& u0,
                                     const Vec& v0) {
  ModeInit init = mode_initial_conditions(K, alpha, beta, u0, v0);
  const double sigma_max = init.dec.sigma.size() ? init.dec.sigma.maxCoeff() : 0.0;

  OscillatorSolution sol;
  sol.U = init.dec.U;
  for (Eigen::Index i = 0; i < init.dec.sigma.size(); ++i) {
    OscillatorMode m;
    m.sigma = init.dec.sigma[i];
    const double z0 = init.z0[i], zd0 = init.zdot0[i];
    if (is_zero_mode(m.sigma, sigma_max)) {
      m.kind = OscillatorMode::Kind::affine;
      m.z0 = z0;
      m.zdot0 = zd0;
      sol.affine_modes.push_back(static_cast<int>(i));
    } else {
      // z = a cos(w t + phi) with a cos(phi) = z0, -a w sin(phi) = zdot0
      m.kind = OscillatorMode::Kind::trig;
      m.omega = std::sqrt(m.sigma);
      m.amplitude = std::hypot(z0, zd0 / m.omega);
      m.phase = std::atan2(-zd0 / m.omega, z0);
    }
    sol.modes.push_back(m);
  }
  return sol;
}

OscillatorSolution damped_solution(const Mat& K, double alpha, double beta, const Vec& u0,
                                   const Vec& v0) {
  ModeInit init = mode_initial_conditions(K, alpha, beta, u0, v0);
  const double sigma_max = init.dec.sigma.size() ? init.dec.sigma.maxCoeff() : 0.0;

  OscillatorSolution sol;
  sol.U = init.dec.U;
  for (Eigen::Index i = 0; i < init.dec.sigma.size(); ++i) {
    OscillatorMode m;
    m.sigma = init.dec.sigma[i];
    const double z0 = init.z0[i], zd0 = init.zdot0[i];
    if (is_zero_mode(m.sigma, sigma_max)) {
      m.kind = OscillatorMode::Kind::affine;
      m.z0 = z0;
      m.zdot0 = zd0;
      sol.affine_modes.push_back(static_cast<int>(i));
      sol.modes.push_back(m);
      continue;
    }
    // Characteristic equation lambda^2 + alpha*sigma*lambda + sigma = 0.
    const double d = alpha * m.sigma / 2;
    const double disc = d * d - m.sigma;
    if (disc < -1e-14 * m.sigma) {
      // Underdamped: z = a exp(-d t) sin(w t + phi)
      m.kind = OscillatorMode::Kind::damped_trig;
      m.damping = d;
      m.omega = std::sqrt(-disc);
      const double s = z0;                  // a sin(phi)
      const double c = (zd0 + d * z0) / m.omega;  // a cos(phi)
      m.amplitude = std::hypot(s, c);
      m.phase = std::atan2(s, c);
    } else if (disc > 1e-14 * m.sigma) {
      // Overdamped: real-exponential pair
      m.kind = OscillatorMode::Kind::real_exp;
      const double root = std::sqrt(disc);
      m.lambda1 = -d + root;
      m.lambda2 = -d - root;
      m.c1 = (zd0 - m.lambda2 * z0) / (m.lambda1 - m.lambda2);
      m.c2 = z0 - m.c1;
    } else {
      // Critically damped: z = (c1 + c2 t) exp(-d t)
      m.kind = OscillatorMode::Kind::critical;
      m.lambda1 = -d;
      m.c1 = z0;
      m.c2 = zd0 + d * z0;
    }
    sol.modes.push_back(m);
  }
  return sol;
}

namespace {

ModeMap make_mode_map(Method method, double kappa, double alpha, double beta) {
  ModeMap mm;
  mm.kappa = kappa;
  const double s = alpha * beta * kappa * kappa;
  mm.M << 1, -alpha * kappa, beta * kappa, 1 - (method == Method::predict ? 2 * s : s);
  const double tr = mm.M.trace();
  mm.det = mm.M(0, 0) * mm.M(1, 1) - mm.M(0, 1) * mm.M(1, 0);
  const double disc = tr * tr - 4 * mm.det;
  if (disc >= 0) {
    const double root = std::sqrt(disc);
    mm.lambda1 = {(tr + root) / 2, 0.0};
    mm.lambda2 = {(tr - root) / 2, 0.0};
  } else {
    const double im = std::sqrt(-disc) / 2;
    mm.lambda1 = {tr / 2, im};
    mm.lambda2 = {tr / 2, -im};
  }
  return mm;
}

}  // namespace

UpdateMapSpectrum discrete_map(Method method, double kappa, double alpha, double beta) {
  UpdateMapSpectrum spec;
  spec.alpha = alpha;
  spec.beta = beta;
  spec.modes.push_back(make_mode_map(method, kappa, alpha, beta));
  spec.spectral_radius =
      std::max(std::abs(spec.modes[0].lambda1), std::abs(spec.modes[0].lambda2));
  return spec;
}

UpdateMapSpectrum update_map_spectrum(Method method, const Mat& K, double alpha, double beta) {
  const ModeDecomposition dec = decompose(K, alpha, beta);
  UpdateMapSpectrum spec;
  spec.alpha = alpha;
  spec.beta = beta;
  spec.spectral_radius = 0.0;
  for (Eigen::Index i = 0; i < dec.sigma.size(); ++i) {
    // sigma_i = (beta/alpha) * s_i^2 with s_i the singular value of K.
    const double kappa = std::sqrt(std::max(0.0, dec.sigma[i] * alpha / beta));
    spec.modes.push_back(make_mode_map(method, kappa, alpha, beta));
    spec.spectral_radius = std::max(
        {spec.spectral_radius, std::abs(spec.modes.back().lambda1), std::abs(spec.modes.back().lambda2)});
  }
  return spec;
}

double trajectory_vs_ode(Method method, const Mat& K, double alpha, double beta, const Vec& u0,
                         const Vec& v0, double horizon_T) {
  if (!(horizon_T > 0)) throw std::invalid_argument("trajectory_vs_ode: horizon must be positive");
  const OscillatorSolution sol = method == Method::plain
                                     ? undamped_solution(K, alpha, beta, u0, v0)
                                     : damped_solution(K, alpha, beta, u0, v0);
  BilinearSaddle problem(K);
  SolverState st = SolverState::init(u0, v0, Updater::sgd(), Updater::sgd());
  const Schedule su = Schedule::constant(alpha);
  const Schedule sv = Schedule::constant(beta);
  const StepOptions opts{.predict_primal = method == Method::predict};
  Rng rng(0);  // exact gradients; stream unused

  const auto n = static_cast<std::int64_t>(std::ceil(horizon_T / alpha));
  double max_err = (st.u - sol.evaluate(0.0)).norm();
  for (std::int64_t k = 1; k <= n; ++k) {
    step(problem, st, su, sv, rng, opts);
    const double err = (st.u - sol.evaluate(static_cast<double>(k) * alpha)).norm();
    max_err = std::max(max_err, err);
  }
  return max_err;
}

}  // namespace predsaddle
