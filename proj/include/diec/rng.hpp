#pragma once

// Counter-based random streams. Every (seed, round, purpose) triple maps to an
// independent generator, so the draws of one purpose (e.g. outcome sampling)
// never shift when another purpose consumes more or fewer numbers.

#include <cstdint>

namespace diec {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Mixes a master seed with a round index and a purpose tag.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                    std::uint64_t tag) noexcept {
  return splitmix64(seed ^ splitmix64(index ^ splitmix64(tag + 0x632BE59BD9B4E019ULL)));
}

enum class StreamTag : std::uint64_t {
  test_flag = 1,
  inputs = 2,
  outcomes = 3,
  blocks = 4,
  twirl = 5,
  device = 6,
  trial = 7,
};

class RandomStream {
 public:
  constexpr explicit RandomStream(std::uint64_t state) noexcept : state_(state) {}
  constexpr RandomStream(std::uint64_t seed, std::uint64_t index, StreamTag tag) noexcept
      : state_(derive_seed(seed, index, static_cast<std::uint64_t>(tag))) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  constexpr bool bernoulli(double p) noexcept { return uniform() < p; }
  constexpr int bit() noexcept { return static_cast<int>(next() >> 63); }

  /// Standard normal via Box-Muller (one value per call, the pair partner is dropped).
  double normal() noexcept;

 private:
  std::uint64_t state_;
};

}  // namespace diec
