#include "predsaddle/mixture.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace predsaddle {

Mat MixtureSpec::means() const {
  if (n_modes < 1) throw std::invalid_argument("mixture: n_modes must be >= 1");
  Mat m(2, n_modes);
  for (int j = 0; j < n_modes; ++j) {
    const double angle = 2 * std::numbers::pi * j / n_modes;
    m(0, j) = center.x() + radius * std::cos(angle);
    m(1, j) = center.y() + radius * std::sin(angle);
  }
  return m;
}

Mat sample_mixture(const MixtureSpec& spec, std::int64_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_mixture: n must be >= 1");
  if (spec.sigma < 0) throw std::invalid_argument("sample_mixture: sigma must be nonnegative");
  const Mat means = spec.means();
  Mat out(2, n);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto j = rng.uniform_int(spec.n_modes);
    out(0, i) = means(0, j) + spec.sigma * rng.normal();
    out(1, i) = means(1, j) + spec.sigma * rng.normal();
  }
  return out;
}

ModeCoverage mode_coverage(const Mat& samples, const MixtureSpec& spec, double threshold_sigmas,
                           double min_fraction) {
  if (samples.rows() != 2 || samples.cols() < 1)
    throw DimensionError("mode_coverage: samples must be a 2 x n matrix with n >= 1");
  const Mat means = spec.means();
  ModeCoverage cov;
  cov.threshold_sigmas = threshold_sigmas;
  cov.min_fraction = min_fraction;
  cov.counts.assign(spec.n_modes, 0);
  std::vector<double> dist_sum(spec.n_modes, 0.0);

  for (Eigen::Index i = 0; i < samples.cols(); ++i) {
    int best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int j = 0; j < spec.n_modes; ++j) {
      const double d2 = (samples.col(i) - means.col(j)).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = j;
      }
    }
    ++cov.counts[best];
    dist_sum[best] += std::sqrt(best_d2);
  }

  const double n = static_cast<double>(samples.cols());
  const double share = min_fraction / spec.n_modes;
  for (int j = 0; j < spec.n_modes; ++j) {
    const double mean_dist = cov.counts[j] > 0
                                 ? dist_sum[j] / static_cast<double>(cov.counts[j])
                                 : std::numeric_limits<double>::quiet_NaN();
    cov.mean_dist.push_back(mean_dist);
    if (cov.counts[j] > 0 && static_cast<double>(cov.counts[j]) / n >= share &&
        mean_dist <= threshold_sigmas * spec.sigma)
      ++cov.covered;
  }
  return cov;
}

}  // namespace predsaddle
