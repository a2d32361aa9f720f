#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>

namespace sketchls::rng {

inline constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// Finalizing 64-bit mix (the output function of splitmix64).
constexpr uint64_t mix64(uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

// O(1) derivation of a statistically independent substream seed. Used for
// per-column, per-replicate, per-trial streams so that work units can be
// generated in any order (or in parallel) with identical results.
constexpr uint64_t derive_seed(uint64_t seed, uint64_t stream) noexcept {
  return mix64(seed + kGolden * (stream + 1));
}

constexpr uint64_t derive_seed(uint64_t seed, uint64_t tag,
                               uint64_t stream) noexcept {
  return derive_seed(derive_seed(seed, tag), stream);
}

// Splittable counter-style generator (splitmix64). Cheap to construct, so
// the idiom throughout the library is one fresh instance per substream.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(uint64_t seed) noexcept : state_(seed) {}

  constexpr uint64_t next() noexcept { return mix64(state_ += kGolden); }

  // Uniform on [0, 1), 53 random bits.
  double next_double() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Unbiased uniform on {0, ..., bound - 1} via rejection; bound >= 1.
  uint64_t next_below(uint64_t bound) noexcept {
    assert(bound >= 1);
    const uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  bool next_bit() noexcept { return (next() >> 63) != 0; }

  // Standard normal via the polar transform; the spare deviate is cached.
  double next_normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sketchls::rng
