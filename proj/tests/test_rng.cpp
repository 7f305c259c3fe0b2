#include <doctest.h>

#include <cmath>

#include "predsaddle/rng.hpp"

using namespace predsaddle;

TEST_CASE("identical seeds give identical streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(42), d(43);
  bool differ = false;
  for (int i = 0; i < 10; ++i) differ = differ || (c.next_u64() != d.next_u64());
  CHECK(differ);
}

TEST_CASE("substreams are distinct and reproducible") {
  Rng a = Rng::substream(7, 0);
  Rng b = Rng::substream(7, 1);
  Rng a2 = Rng::substream(7, 0);
  CHECK(a.next_u64() != b.next_u64());
  Rng a3 = Rng::substream(7, 0);
  CHECK(a3.next_u64() == a2.next_u64());
}

TEST_CASE("uniform lies in [0,1) and uniform_pos in (0,1]") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double p = rng.uniform_pos();
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("normal has standard moments") {
  Rng rng(3);
  const int n = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  // 4-sigma statistical bounds
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("uniform_int covers its range uniformly") {
  Rng rng(5);
  int counts[8] = {0};
  const int n = 80000;
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_int(8)];
  for (int c : counts) CHECK(std::abs(c - n / 8) < 4 * std::sqrt(n * (1.0 / 8) * (7.0 / 8)));
}
