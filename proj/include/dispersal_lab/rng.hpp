#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace dlab {

/// SplitMix64 step; used both as a seed expander and as an avalanche mixer.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic per-replica seed: mixes (master_seed, replica_index) so that
/// distinct indices yield statistically independent streams.
inline std::uint64_t derive_replica_seed(std::uint64_t master_seed,
                                         std::uint64_t replica_index) {
  std::uint64_t s = master_seed;
  std::uint64_t a = splitmix64(s);
  s ^= replica_index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
  std::uint64_t b = splitmix64(s);
  return a ^ (b + 0x9e3779b97f4a7c15ULL);
}

/// xoshiro256** engine. Satisfies UniformRandomBitGenerator, so it plugs into
/// the <random> distributions. One instance per replica / per thread.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed = 0) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

  result_type operator()() {
    const std::uint64_t r = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return r;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Exp(1) via inverse transform.
  double exponential() {
    double u;
    do {
      u = uniform();
    } while (u >= 1.0);
    return -std::log1p(-u);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace dlab
