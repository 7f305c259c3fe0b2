#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace predsaddle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Raised when a config file cannot be parsed or fails validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a primal-dual gap is requested for a problem with no known saddle.
class GapUnavailableError : public std::runtime_error {
 public:
  GapUnavailableError() : std::runtime_error("gap unavailable: problem has no known saddle") {}
};

// Raised by a solver step when a gradient or iterate turns non-finite.
// `step` is the 1-indexed step that failed.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(std::int64_t step)
      : std::runtime_error("divergence detected at step " + std::to_string(step)), step(step) {}
  std::int64_t step;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace predsaddle
