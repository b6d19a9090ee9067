#pragma once

#include <cstdint>
#include <vector>

namespace qmc {

// SplitMix64 finalizer. Bijective on 64-bit words with strong avalanche,
// which is what makes the counter-based scheme below work.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based random stream. A key is an immutable value derived from a
// user seed plus a chain of labels (purpose, replication, dimension, ...);
// the t-th variate of a stream is a pure function of (key, t). Streams can
// therefore be evaluated in any order and from any thread, and replications
// are reproducible without storing generator state.
class RngKey {
 public:
  RngKey() : state_(mix64(0)) {}
  explicit RngKey(std::uint64_t seed) : state_(mix64(seed ^ 0x6a09e667f3bcc908ULL)) {}

  // Derive a child stream. Labels on distinct derivation paths give
  // statistically independent streams.
  RngKey child(std::uint64_t label) const noexcept {
    RngKey k;
    k.state_ = mix64(state_ ^ mix64(label + 0x510e527fade682d1ULL));
    return k;
  }

  std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(state_ ^ (counter * 0xd1342543de82ef95ULL + 0x2b7e151628aed2a6ULL));
  }

  // Uniform double in [0, 1) with 53 random mantissa bits.
  double uniform01(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound). Multiply-shift reduction; the bias is
  // bound/2^64 which is far below anything our chi-square suites can see.
  std::uint32_t below(std::uint64_t counter, std::uint32_t bound) const noexcept {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(bits(counter)) * bound) >> 64);
  }

  // Fisher-Yates permutation of {0,...,b-1}, consuming counters
  // counter0, counter0+1, ...
  std::vector<std::uint8_t> permutation(std::uint64_t counter0, std::uint32_t b) const {
    std::vector<std::uint8_t> p(b);
    for (std::uint32_t v = 0; v < b; ++v) p[v] = static_cast<std::uint8_t>(v);
    for (std::uint32_t v = b - 1; v > 0; --v) {
      std::uint32_t j = below(counter0++, v + 1);
      std::uint8_t t = p[v];
      p[v] = p[j];
      p[j] = t;
    }
    return p;
  }

  std::uint64_t raw_state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

// Derivation labels used across the library. Kept in one place so that
// distinct subsystems never collide on a derivation path.
namespace rng_label {
inline constexpr std::uint64_t lattice_shift = 0x11;
inline constexpr std::uint64_t digital_shift = 0x12;
inline constexpr std::uint64_t lms = 0x13;
inline constexpr std::uint64_t nus = 0x14;
inline constexpr std::uint64_t digit_permutation = 0x15;
inline constexpr std::uint64_t iid = 0x16;
inline constexpr std::uint64_t replication = 0x21;
inline constexpr std::uint64_t dimension = 0x22;
inline constexpr std::uint64_t depth = 0x23;
}  // namespace rng_label

}  // namespace qmc
