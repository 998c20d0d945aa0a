// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

namespace smoothing {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Maps a 128-bit counter and a 64-bit key to 128
/// pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based random stream.
///
/// Stream splitting: `RandomStream(seed, chunk, tag)` uses the seed as the
/// Philox key and the counter layout
///
///     word 0..1 : 64-bit block index within the stream (starts at 0)
///     word 2    : chunk index
///     word 3    : tag (0 for tree simulation, k for pool iteration k)
///
/// so every (seed, chunk, tag) triple addresses a disjoint sequence of
/// 2^64 blocks. Each block yields two 64-bit outputs.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t chunk, std::uint32_t tag = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        chunk_(chunk),
        tag_(tag) {}

  std::uint64_t next_u64() {
    if (have_ == 0) refill();
    --have_;
    return buffer_[have_];
  }

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound) by multiply-shift. bound > 0.
  std::uint64_t uniform_index(std::uint64_t bound) {
    __extension__ using u128 = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<u128>(next_u64()) * bound) >> 64);
  }

  std::uint64_t blocks_used() const { return block_; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint32_t chunk_;
  std::uint32_t tag_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int have_ = 0;
};

}  // namespace smoothing
