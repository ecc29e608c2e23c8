#pragma once

#include <array>
#include <cstdint>

namespace usf {

/// Philox4x32-10 block function. Exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based random stream.
///
/// The 64-bit seed is the Philox key; the 128-bit counter is
/// (block index, stream_id). Draws depend only on (seed, stream_id, position),
/// so results are identical across platforms and across thread layouts as
/// long as each unit of work gets its own substream. All distributions are
/// implemented here instead of with <random> because the standard
/// distributions are not specified bit-exactly.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  bool coin() { return (next_u32() & 1u) != 0; }

  /// Child stream keyed by a hash of (seed, stream_id); distinct indices get
  /// distinct counters under the same derived key.
  RandomStream substream(std::uint64_t index) const;

  // UniformRandomBitGenerator, for std::shuffle and friends in tests.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned used_ = 4;
};

/// SplitMix64 finalizer; used to derive substream keys.
std::uint64_t mix64(std::uint64_t x);

}  // namespace usf
