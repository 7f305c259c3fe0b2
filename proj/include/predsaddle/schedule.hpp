#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace predsaddle {

// Learning-rate schedule, indexed from step k = 1.
//   constant:      rate(k) = base
//   inverse_sqrt:  rate(k) = base / sqrt(k)
class Schedule {
 public:
  enum class Kind { constant, inverse_sqrt };

  static Schedule constant(double base) { return Schedule(Kind::constant, base); }
  static Schedule inverse_sqrt(double base) { return Schedule(Kind::inverse_sqrt, base); }

  double rate(std::int64_t k) const {
    if (k < 1) throw std::invalid_argument("schedule step index must be >= 1");
    return kind_ == Kind::constant ? base_ : base_ / std::sqrt(static_cast<double>(k));
  }

  Kind kind() const { return kind_; }
  double base() const { return base_; }

 private:
  Schedule(Kind kind, double base) : kind_(kind), base_(base) {
    if (base < 0 || !std::isfinite(base)) throw std::invalid_argument("schedule base must be finite and >= 0");
  }

  Kind kind_;
  double base_;
};

}  // namespace predsaddle
