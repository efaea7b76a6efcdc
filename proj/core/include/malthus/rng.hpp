#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace malthus {

/// Philox4x64-10 counter-based generator (Salmon et al., SC'11).
///
/// Output block i is bijection(counter = {c0, c1 + i, 0, 0}, key). There is no
/// hidden state beyond the block index, so a generator can be rebuilt anywhere
/// from its key and counter prefix. Satisfies UniformRandomBitGenerator.
class Philox4x64 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  Philox4x64(Key key, std::uint64_t counter_hi) : key_(key), counter_hi_(counter_hi) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (lane_ == 4) {
      buffer_ = bijection({counter_hi_, block_index_++, 0, 0}, key_);
      lane_ = 0;
    }
    return buffer_[lane_++];
  }

  /// Uniform double on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t blocks_consumed() const { return block_index_; }

  static Block bijection(Block counter, Key key);

 private:
  Key key_;
  std::uint64_t counter_hi_;
  std::uint64_t block_index_ = 0;
  Block buffer_{};
  int lane_ = 4;
};

/// Reproducible random stream identified by (seed, stream_index).
///
/// The pair is the Philox key, so streams with different indices never share
/// draws. `substream(k)` derives an independent sequence for sub-unit `k` (a
/// cell of a tree), keyed on (seed, stream_index, k) and therefore independent
/// of the order in which sub-units are visited.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_index)
      : seed_(seed), stream_index_(stream_index) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  Philox4x64 substream(std::uint64_t key) const { return Philox4x64({seed_, stream_index_}, key); }
  Philox4x64 engine() const { return substream(0); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_index_;
};

/// 64-bit finalizer of SplitMix64; used to derive tree-path keys.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace malthus
