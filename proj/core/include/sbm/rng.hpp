#pragma once

#include <cmath>
#include <cstdint>

namespace sbm {

// Project-wide generator: SplitMix64 (Steele, Lea, Flood 2014; the
// java.util.SplittableRandom finalizer). Chosen so that graphs and
// experiments are reproducible from a few lines of integer arithmetic in
// any language. The full contract:
//
//   state' = state + 0x9E3779B97F4A7C15
//   out    = mix64(state')
//   mix64(z): z ^= z>>30; z *= 0xBF58476D1CE4E5B9;
//             z ^= z>>27; z *= 0x94D049BB133111EB; z ^= z>>31
//
// Uniform double in [0,1): (out >> 11) * 2^-53.
// Substreams: derive(seed, tag) = mix64(seed ^ mix64(tag + 0x9E3779B97F4A7C15)),
// folded left-to-right for multiple tags.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) noexcept {
  return mix64(seed ^ mix64(tag + kGolden));
}

template <typename... Tags>
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t tag, Tags... rest) noexcept {
  return derive(derive(seed, tag), static_cast<std::uint64_t>(rest)...);
}

// Stream tags. Fixed constants, part of the reproducibility contract.
inline constexpr std::uint64_t kTagSpectral = 1;  // K-rank approximation start block
inline constexpr std::uint64_t kTagImprove = 2;   // improvement-round tie breaks
inline constexpr std::uint64_t kTagAssign = 3;    // trimmed-vertex assignment tie breaks
inline constexpr std::uint64_t kTagNorm = 4;      // power-iteration start vector
inline constexpr std::uint64_t kTagTrial = 5;     // per-trial seeds in sweeps
inline constexpr std::uint64_t kTagDiag = 6;      // per-row seeds in diagnostics

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGolden;
    return mix64(state_);
  }

  // [0, 1), 53-bit resolution. Strictly below 1, so prob = 1 always accepts
  // and prob = 0 never does.
  double next_unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // (0, 1); safe as a log() argument.
  double next_open() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased-enough uniform in [0, bound) via multiply-shift.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  // Box-Muller, two draws per value (no cached partner; keeps the stream
  // position a pure function of the call count).
  double next_gaussian() noexcept {
    const double u = next_open();
    const double v = next_unit();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586477 * v);
  }

 private:
  std::uint64_t state_;
};

// One keyed value; used for scheduling-independent per-item tie breaks.
constexpr std::uint64_t keyed_u64(std::uint64_t stream, std::uint64_t a,
                                  std::uint64_t b) noexcept {
  return derive(stream, a, b);
}

inline std::uint64_t keyed_below(std::uint64_t stream, std::uint64_t a, std::uint64_t b,
                                 std::uint64_t bound) noexcept {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(keyed_u64(stream, a, b)) * bound) >> 64);
}

}  // namespace sbm
