#pragma once

#include <cstdint>
#include <vector>

#include "predsaddle/rng.hpp"
#include "predsaddle/types.hpp"

namespace predsaddle {

// Isotropic Gaussian mixture with means equally spaced on a circle:
// mu_j = center + radius * (cos(2 pi j / n), sin(2 pi j / n)).
struct MixtureSpec {
  int n_modes = 8;
  double radius = 1.0;
  double sigma = 0.01;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();

  Mat means() const;  // 2 x n_modes
};

// n samples, one per column: uniform mode index, then mu_j + sigma * N(0, I).
Mat sample_mixture(const MixtureSpec& spec, std::int64_t n, Rng& rng);

// A mode is covered when it receives at least min_fraction of its uniform
// share of the samples and the assigned samples sit within threshold_sigmas
// standard deviations of the mode mean on average.
struct ModeCoverage {
  int covered = 0;
  std::vector<std::int64_t> counts;
  std::vector<double> mean_dist;  // NaN for modes with no assigned samples
  double threshold_sigmas = 3.0;
  double min_fraction = 0.2;
};

ModeCoverage mode_coverage(const Mat& samples, const MixtureSpec& spec,
                           double threshold_sigmas = 3.0, double min_fraction = 0.2);

}  // namespace predsaddle
