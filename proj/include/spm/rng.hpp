#pragma once

#include <cstdint>

namespace spm {

// Identity string recorded in output metadata so runs can be matched to the
// exact split procedure that produced them.
inline constexpr const char* kSplitRngId = "splitmix64/fisher-yates/v1";

/// splitmix64 stream (Steele et al.), fully determined by its 64-bit state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, bound) via rejection sampling.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % bound;
  }

 private:
  std::uint64_t state_;
};

/// Combines (seed, repetition, class) into one stream seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t repetition, std::uint64_t cls) {
  SplitMix64 g(seed);
  std::uint64_t a = g.next();
  SplitMix64 h(a ^ (repetition * 0xD1342543DE82EF95ull));
  std::uint64_t b = h.next();
  SplitMix64 k(b ^ (cls * 0xAF251AF3B0F025B5ull));
  return k.next();
}

}  // namespace spm
