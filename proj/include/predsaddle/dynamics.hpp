#pragma once

#include <complex>
#include <vector>

#include "predsaddle/solver.hpp"
#include "predsaddle/types.hpp"

namespace predsaddle {

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Sweeps until the off-diagonal Frobenius norm falls below
// tol * max(1, |S|_F), up to max_sweeps. Eigenvalues unsorted.
struct JacobiResult {
  Mat eigenvectors;  // columns
  Vec eigenvalues;
  int sweeps = 0;
};

JacobiResult jacobi_eigh(const Mat& symmetric, double tol = 1e-12, int max_sweeps = 100);

// Eigendecomposition (beta/alpha) K^T K = U diag(sigma) U^T with sigma sorted
// descending. The mode coordinates are z = U^T u.
struct ModeDecomposition {
  Mat U;
  Vec sigma;
  double alpha = 0.0, beta = 0.0;
};

ModeDecomposition decompose(const Mat& K, double alpha, double beta);

// One decoupled mode of the continuous-time limit dynamics. Rank-deficient
// modes (sigma = 0) evolve affinely and are flagged on the solution.
struct OscillatorMode {
  enum class Kind { trig, damped_trig, real_exp, critical, affine };
  Kind kind = Kind::trig;
  double sigma = 0.0;
  double amplitude = 0.0, phase = 0.0, omega = 0.0, damping = 0.0;  // trig forms
  double c1 = 0.0, c2 = 0.0, lambda1 = 0.0, lambda2 = 0.0;         // exponential forms
  double z0 = 0.0, zdot0 = 0.0;                                    // affine form

  double eval(double t) const;
};

struct OscillatorSolution {
  Mat U;
  std::vector<OscillatorMode> modes;
  std::vector<int> affine_modes;  // indices of flagged sigma = 0 modes

  // u(t) = U z(t)
  Vec evaluate(double t) const;
};

// Closed-form solution of z_dd = -Sigma z (one mode per eigenvalue), matching
// u(0) = u0 and u_dot(0) = -K^T v0. The continuous-time limit of the plain
// alternating method with time unit t = k * alpha.
OscillatorSolution undamped_solution(const Mat& K, double alpha, double beta, const Vec& u0,
                                     const Vec& v0);

// Closed-form solution of z_dd = -Sigma z - alpha * Sigma * z_dot, the limit
// of the prediction method. Solves the characteristic equation
// lambda^2 + alpha*sigma*lambda + sigma = 0 per mode; underdamped modes decay
// at rate alpha*sigma/2 with frequency sqrt(sigma - (alpha*sigma/2)^2), and
// overdamped modes use the real-exponential pair.
OscillatorSolution damped_solution(const Mat& K, double alpha, double beta, const Vec& u0,
                                   const Vec& v0);

// The 2x2 linear map one alternating step applies to a single coupling mode
// (u, v) with scalar coupling kappa:
//   plain:   [[1, -a*k], [b*k, 1 -   a*b*k^2]]
//   predict: [[1, -a*k], [b*k, 1 - 2*a*b*k^2]]
struct ModeMap {
  Eigen::Matrix2d M;
  std::complex<double> lambda1, lambda2;
  double det = 0.0;
  double kappa = 0.0;
};

struct UpdateMapSpectrum {
  std::vector<ModeMap> modes;
  double spectral_radius = 0.0;
  double alpha = 0.0, beta = 0.0;
};

// Scalar-mode spectrum.
UpdateMapSpectrum discrete_map(Method method, double kappa, double alpha, double beta);

// Per-eigenmode spectrum for a matrix coupling: one ModeMap per singular value
// of K (the scalar coupling of that mode).
UpdateMapSpectrum update_map_spectrum(Method method, const Mat& K, double alpha, double beta);

// Runs the discrete method (plain SGD updates, constant rates) on the bilinear
// problem for ceil(T/alpha) steps and returns max_k |u_k - u(k*alpha)| against
// the matching closed form (undamped for plain, damped for predict).
double trajectory_vs_ode(Method method, const Mat& K, double alpha, double beta, const Vec& u0,
                         const Vec& v0, double horizon_T);

}  // namespace predsaddle
