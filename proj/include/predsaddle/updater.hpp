#pragma once

#include <cstdint>

#include "predsaddle/types.hpp"

namespace predsaddle {

enum class Direction { descent, ascent };

// Inner update rule turning a gradient into a parameter step. Owns its state
// (momentum / Adam moments); value semantics, so a run can snapshot or copy it.
//
// Ascent differs from descent only by the sign of the gradient fed in.
class Updater {
 public:
  enum class Kind { sgd, momentum_sgd, adam };

  static Updater sgd();
  static Updater momentum_sgd(double momentum);
  static Updater adam(double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  // Applies one update and returns the new parameters. `rate` is the schedule
  // value for this step. Mutates internal state (momentum buffers, step count).
  Vec step(const Vec& x, const Vec& grad, double rate, Direction dir);

  Kind kind() const { return kind_; }
  std::int64_t steps_taken() const { return t_; }

 private:
  Updater(Kind kind, double momentum, double beta1, double beta2, double epsilon);

  Kind kind_;
  double momentum_ = 0.0;
  double beta1_ = 0.9, beta2_ = 0.999, epsilon_ = 1e-8;
  std::int64_t t_ = 0;
  Vec m_, v_;
};

// One bias-corrected Adam update on externally held moments; `t` is the
// 1-indexed step this update corresponds to. Returns the new parameters.
Vec adam_update(Vec x, const Vec& grad, double rate, Vec& m, Vec& v, std::int64_t t,
                double beta1, double beta2, double epsilon);

}  // namespace predsaddle
