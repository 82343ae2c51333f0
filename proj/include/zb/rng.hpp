#pragma once

#include <cstdint>
#include <random>

namespace zb {

/// Deterministic random stream. Every stochastic routine in the library
/// takes one of these by reference; there is no global generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed)
      : seed_(seed), state_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

  /// Uniform double in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(state_() >> 11) * 0x1.0p-53; }

  /// Unbiased uniform integer in [0, n), n >= 1.
  std::size_t below(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = state_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

  /// Independent child stream for replication `index`. Deterministic in
  /// (seed, index) only, so parallel replications merge reproducibly.
  Rng derive(std::uint64_t index) const {
    return Rng(mix(seed_ + 0x632be59bd9b4e019ull * (index + 1)));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 state_;
};

}  // namespace zb
