#pragma once

#include <cstdint>

namespace perclab {

// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_pair(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a ^ mix64(b ^ 0x6a09e667f3bcc909ULL));
}

// Top 53 bits as a double in [0, 1).
constexpr double to_unit(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Counter-based stream keyed by (master seed, sample index).
///
/// Nothing is stateful: a draw is a pure function of the key and a counter,
/// so samples can be generated in any order or on any worker. Edge states are
/// drawn with `edge_uniform`, which hashes the canonical edge fingerprint, so
/// the uniform attached to an edge does not depend on traversal order. This
/// is what couples samples at different p.
class SampleStream {
 public:
  constexpr SampleStream(std::uint64_t seed, std::uint64_t index) noexcept
      : key_(mix_pair(mix64(seed), index)) {}

  constexpr std::uint64_t key() const noexcept { return key_; }

  constexpr double edge_uniform(std::uint64_t edge_fp) const noexcept {
    return to_unit(mix64(key_ ^ edge_fp));
  }

  /// Independent sub-stream, e.g. for the branching draws of the
  /// compositional sampler.
  constexpr SampleStream substream(std::uint64_t domain) const noexcept {
    return SampleStream(key_, domain, 0);
  }

 private:
  constexpr SampleStream(std::uint64_t key, std::uint64_t domain, int) noexcept
      : key_(mix_pair(key ^ 0xa54ff53a5f1d36f1ULL, domain)) {}

  std::uint64_t key_;
};

/// Sequential reader over a SampleStream's counter space.
class CounterRng {
 public:
  explicit constexpr CounterRng(const SampleStream& s) noexcept : key_(s.key()) {}

  constexpr double uniform() noexcept { return to_unit(mix_pair(key_, ++counter_)); }

  constexpr std::uint64_t next_u64() noexcept { return mix_pair(key_, ++counter_); }

  constexpr std::uint64_t consumed() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace perclab
