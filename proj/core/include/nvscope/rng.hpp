#pragma once

#include <cstdint>
#include <limits>

namespace nvscope {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Counter-based random stream keyed by (seed, frame, pixel). Output k is a pure function of the
/// key and k, so streams for different pixels can be generated in any order or in parallel.
/// Satisfies UniformRandomBitGenerator for use with <random> distributions.
class CounterRng {
public:
  using result_type = std::uint64_t;

  constexpr CounterRng(std::uint64_t seed, std::uint64_t frame, std::uint64_t pixel)
      : key_(splitmix64(splitmix64(splitmix64(seed) ^ frame) ^ pixel)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    ++counter_;
    return splitmix64(key_ + counter_ * 0xD1B54A32D192ED03ull);
  }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace nvscope
