// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <set>

#include "smoothing/random_stream.hpp"

using smoothing::philox4x32_10;
using smoothing::RandomStream;

// Known-answer vectors of the Philox4x32-10 reference implementation.
TEST_CASE("philox known answers") {
  using A = std::array<std::uint32_t, 4>;
  using K = std::array<std::uint32_t, 2>;
  CHECK(philox4x32_10(A{0, 0, 0, 0}, K{0, 0}) ==
        A{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10(A{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                      K{0xffffffff, 0xffffffff}) ==
        A{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10(A{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                      K{0xa4093822, 0x299f31d0}) ==
        A{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  RandomStream a(42, 3, 1), b(42, 3, 1), c(42, 4, 1), d(42, 3, 2), e(43, 3, 1);
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
  }
  firsts.insert(RandomStream(42, 3, 1).next_u64());
  firsts.insert(c.next_u64());
  firsts.insert(d.next_u64());
  firsts.insert(e.next_u64());
  CHECK(firsts.size() == 4);
}

TEST_CASE("uniforms stay inside the open interval") {
  RandomStream rng(7, 0);
  double sum = 0.0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform_open();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // Mean of n uniforms: sd 1/sqrt(12 n).
  CHECK(std::abs(sum / n - 0.5) < 5.0 / std::sqrt(12.0 * n));
  CHECK(rng.blocks_used() == n / 2);
}

TEST_CASE("uniform_index covers the range evenly") {
  RandomStream rng(1, 9);
  std::array<int, 7> hits{};
  for (int i = 0; i < 70'000; ++i) {
    const auto k = rng.uniform_index(7);
    REQUIRE(k < 7);
    ++hits[k];
  }
  for (int h : hits) CHECK(std::abs(h - 10'000) < 500);
}
