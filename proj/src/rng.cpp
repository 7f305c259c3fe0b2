#include "predsaddle/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace predsaddle {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng Rng::substream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(mix64(seed + kGolden * (stream + 1)));
}

std::uint64_t Rng::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::int64_t Rng::uniform_int(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("uniform_int: n must be >= 1");
  const auto i = static_cast<std::int64_t>(uniform() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

}  // namespace predsaddle
