#pragma once

#include <cmath>
#include <cstdint>

namespace harqdvp {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based generator: the i-th output of stream (seed, stream) is
// mix64(key + i * golden). Any partition of work that derives its stream
// index from a fixed partition number is reproducible regardless of how
// partitions are scheduled.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(seed) ^ mix64(mix64(stream) + kGolden)) {}

  std::uint64_t next() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
  }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Inverse-CDF exponential draw, monotone in the underlying uniform.
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace harqdvp
