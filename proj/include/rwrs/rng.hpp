#pragma once

#include <cmath>
#include <cstdint>

namespace rwrs {

// SplitMix64 finalizer (Stafford mix 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// Substream role tags. Each module owns one tag so that walk steps, scenery
// innovations and nested Monte Carlo draws never share a stream.
enum SubstreamRole : std::uint32_t {
  kRoleStep = 1,
  kRoleScenery = 2,
  kRoleInnovation = 3,
  kRoleInnerMc = 4,
};

// Identifies one value stream. The stream content is a pure function of the
// three fields; replications use stream_id, sites use stream_id as well
// (per-module, disambiguated by substream).
struct RngKey {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
  std::uint32_t substream = 0;
};

constexpr std::uint64_t derive_stream_base(const RngKey& key) noexcept {
  std::uint64_t h = mix64(key.master_seed + kGoldenGamma);
  h = mix64(h ^ key.stream_id);
  h = mix64(h ^ (static_cast<std::uint64_t>(key.substream) * 0xd6e8feb86659fd93ULL + 0x2545f4914f6cdd1dULL));
  return h;
}

// Counter-addressable generator. Every consumer indexes draws explicitly, so
// arbitrary sites and replications can be evaluated out of order and in
// parallel with bit-identical results.
class RngStream {
 public:
  constexpr RngStream() = default;
  explicit constexpr RngStream(const RngKey& key) : base_(derive_stream_base(key)) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(base_ + counter * kGoldenGamma);
  }

  // [0,1) with full 53-bit mantissa resolution.
  double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // (0,1), midpoint grid; safe under log and power inversions.
  double uniform_open(std::uint64_t counter) const noexcept {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  // One standard normal per counter: Box-Muller on the two 32-bit halves.
  double normal(std::uint64_t counter) const noexcept {
    const std::uint64_t w = bits(counter);
    const double u1 = (static_cast<double>(w >> 32) + 0.5) * 0x1.0p-32;
    const double u2 = (static_cast<double>(w & 0xffffffffULL) + 0.5) * 0x1.0p-32;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692529 * u2);
  }

  // Child stream for events that consume a variable number of draws
  // (rejection loops). Keyed off one counter of the parent.
  constexpr RngStream child(std::uint64_t counter) const noexcept {
    RngStream s;
    s.base_ = mix64((base_ ^ 0xa0761d6478bd642fULL) + counter * 0xe7037ed1a0b428dbULL);
    return s;
  }

 private:
  std::uint64_t base_ = 0;
};

inline double uniform(const RngKey& key, std::uint64_t counter) noexcept {
  return RngStream(key).uniform(counter);
}

}  // namespace rwrs
