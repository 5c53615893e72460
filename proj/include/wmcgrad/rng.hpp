#pragma once

#include <cmath>
#include <cstdint>

namespace wmcgrad {

// Counter-based generator: the i-th output is splitmix64(seed + i * golden).
// The integer stream is identical everywhere; the real-valued transforms go
// through <cmath> and so match across platforms whose libm rounds log/cos the
// same way.
class RngStream {
 public:
  explicit RngStream(uint64_t seed = 0) : seed_(seed) {}

  uint64_t seed() const { return seed_; }
  uint64_t counter() const { return counter_; }

  uint64_t next_u64() { return mix(seed_ + (++counter_) * kGolden); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  // Uniform in (0, 1).
  double uniform_open() {
    double u;
    do u = uniform();
    while (u == 0.0);
    return u;
  }
  bool bernoulli(double p) { return uniform() < p; }
  // Uniform integer in [0, n), n > 0, by rejection.
  uint64_t below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do x = next_u64();
    while (x >= limit);
    return x % n;
  }
  // Box-Muller, one output per call.
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
  double gumbel() { return -std::log(-std::log(uniform_open())); }
  // Difference of two Gumbels, i.e. Logistic(0, 1).
  double logistic() {
    const double u = uniform_open();
    return std::log(u) - std::log1p(-u);
  }

  // Independent stream keyed by (seed, id).
  RngStream split(uint64_t id) const { return RngStream(mix(seed_ ^ mix(id + kGolden))); }

  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  static constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ull;
  uint64_t seed_;
  uint64_t counter_ = 0;
};

}  // namespace wmcgrad
