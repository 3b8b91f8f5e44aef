#pragma once

#include <cstdint>

namespace mlgc::rng {

// SplitMix64 (Steele, Lea, Vigna). Chosen over std::mt19937 because its
// output is a pure function of the 64-bit state, which makes stream
// derivation trivial and keeps every sample reproducible across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    // Modulo bias is < 2^-32 for the bounds used here (n <= millions).
    return next() % bound;
  }

 private:
  std::uint64_t state_;
};

// Derives a child seed from (seed, tag). Used for stream splitting: each
// consumer of randomness owns a tag, so e.g. the draws of layer l do not
// shift when the number of layers changes.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
  SplitMix64 a(seed);
  SplitMix64 b(a.next() ^ tag);
  return b.next();
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t tag1, std::uint64_t tag2) {
  return derive(derive(seed, tag1), tag2);
}

// Stream tags. Arbitrary distinct constants.
inline constexpr std::uint64_t kStreamPartition = 0x70617274ULL;   // sampler: ground-truth labels
inline constexpr std::uint64_t kStreamConnectivity = 0x636F6E6EULL;// sampler: per-layer connectivity
inline constexpr std::uint64_t kStreamAdjacency = 0x61646A61ULL;   // sampler: per-layer edges
inline constexpr std::uint64_t kStreamNodeMask = 0x6D61736BULL;    // sampler: per-layer node masks
inline constexpr std::uint64_t kStreamEdgeMask = 0x656D736BULL;    // sampler: per-layer edge masks
inline constexpr std::uint64_t kStreamKmeans = 0x6B6D6E73ULL;      // methods: k-means seeding
inline constexpr std::uint64_t kStreamIter = 0x69746572ULL;        // methods: per-iteration k-means
inline constexpr std::uint64_t kStreamTrial = 0x7472696CULL;       // harness: per-trial instance seeds
inline constexpr std::uint64_t kStreamDrop = 0x64726F70ULL;        // harness: --drop-rho masks

}  // namespace mlgc::rng
