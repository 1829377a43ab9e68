#pragma once

#include <cstdint>

#include "bsilp/rational.hpp"

namespace bsilp {

// Stateless counter-based generator: the value at any position depends only
// on (seed, counter), so disjoint index ranges can be drawn concurrently and
// still reproduce the sequential stream bit for bit. The core is the
// splitmix64 finalizer over a Weyl sequence.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x9E3779B97F4A7C15ull)) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(key_ + 0x9E3779B97F4A7C15ull * (counter + 1));
  }

  // 53-bit uniform in [0, 1).
  double uniform01(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // Same draw as an exact dyadic rational k / 2^53, so membership tests on
  // sampled points are decided exactly by the half-open cell convention.
  Rational uniform_rational(std::uint64_t counter) const {
    return Rational(BigInt(bits(counter) >> 11),
                    BigInt(std::uint64_t(1) << 53));
  }

  // Independent stream for replication k of a seeded experiment.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
    return mix(seed + 0xD1B54A32D192ED03ull * (k + 1));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

}  // namespace bsilp
