#pragma once

#include <cstdint>

namespace sirsurv::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Top 53 bits mapped onto [0, 1).
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Hash of a (seed, step, node, purpose, slot) tuple. Every random decision
/// in the simulator is keyed this way, so results never depend on the order
/// in which nodes are visited.
constexpr std::uint64_t key(std::uint64_t seed, std::uint64_t step, std::uint64_t node,
                            std::uint64_t purpose, std::uint64_t slot = 0) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ step);
  h = splitmix64(h ^ node);
  h = splitmix64(h ^ (purpose << 32 | (slot & 0xffffffffULL)));
  return h;
}

constexpr double uniform(std::uint64_t seed, std::uint64_t step, std::uint64_t node,
                         std::uint64_t purpose, std::uint64_t slot = 0) noexcept {
  return to_unit(key(seed, step, node, purpose, slot));
}

/// Sequential SplitMix64 stream. Output is fully specified, unlike the
/// std distributions, so seeded runs are reproducible across toolchains.
class Stream {
public:
  explicit constexpr Stream(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr double uniform() noexcept { return to_unit(next()); }

  /// Unbiased integer in [0, bound), bound > 0.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = next();
      if (x >= threshold) return x % bound;
    }
  }

private:
  std::uint64_t state_;
};

}  // namespace sirsurv::rng
