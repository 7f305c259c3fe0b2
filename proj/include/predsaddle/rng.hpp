#pragma once

#include <cstdint>

namespace predsaddle {

// SplitMix64 stream (Steele, Lea & Flood 2014): 64-bit counter state advanced by
// a fixed odd increment, one avalanche mix per output. Chosen over the standard
// library engines because its output is identical on every platform, which is
// what makes whole experiment runs byte-reproducible from a single seed.
//
// Gaussian variates come from Box-Muller on the raw uniforms (with a cached
// spare), again to keep the stream portable; std::normal_distribution is
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Independent substream for (seed, stream). Used to split one experiment
  // seed into data/init/probe streams without overlap.
  static Rng substream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53 random bits.
  double uniform();
  // Uniform on (0, 1]; safe under log().
  double uniform_pos();
  // Standard normal via Box-Muller.
  double normal();
  // Uniform integer in [0, n), n >= 1.
  std::int64_t uniform_int(std::int64_t n);

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace predsaddle
