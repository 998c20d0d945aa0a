// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "smoothing/batch_io.hpp"
#include "smoothing/cascade.hpp"
#include "smoothing/errors.hpp"

using namespace smoothing;

namespace {

const OffspringLaw kBinaryTree(offspring::Deterministic{1});
const OffspringLaw kGeometric(offspring::Geometric{0.75});

}  // namespace

TEST_CASE("method parsing") {
  const auto tree = parse_method("tree:depth=12");
  CHECK(std::get<TreeMethod>(tree).depth == 12);
  const auto pool = parse_method("pool:M=200000,K=50");
  CHECK(std::get<PoolMethod>(pool).pool_size == 200000);
  CHECK(std::get<PoolMethod>(pool).iterations == 50);
  CHECK(describe_method(pool) == "pool:M=200000,K=50");
  CHECK(std::get<PoolMethod>(pool).normalize);
  const auto raw = parse_method("pool:M=20000,K=3,normalize=0");
  CHECK_FALSE(std::get<PoolMethod>(raw).normalize);
  CHECK(describe_method(raw) == "pool:M=20000,K=3,normalize=0");
  CHECK_THROWS_AS(parse_method("pool:M=20000,K=3,normalize=2"), ParseError);
  CHECK_THROWS_AS(parse_method("tree"), ParseError);
  CHECK_THROWS_AS(parse_method("walk:depth=3"), ParseError);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(make_cascade_spec(kBinaryTree, 0.4, TreeMethod{3}), ValidationError);
  // 2^40 nodes per sample.
  CHECK_THROWS_AS(make_cascade_spec(kBinaryTree, 1.0, TreeMethod{40}), ResourceError);
  auto spec = make_cascade_spec(kBinaryTree, 1.0, TreeMethod{12});
  spec.method = PoolMethod{100, 5};
  CHECK_THROWS_AS(validate(spec), ValidationError);
  spec.method = TreeMethod{12};
  spec.worker_count = 0;
  CHECK_THROWS_AS(validate(spec), ValidationError);
}

TEST_CASE("parallel kernels equal the serial reference bit for bit") {
  for (int workers : {1, 2, 3}) {
    const auto tree = make_cascade_spec(kGeometric, 2.0 / 3.0, TreeMethod{6}, 5, workers);
    const auto a = simulate_tree(tree, 10'000);  // spans three chunks
    CHECK(a == reference::simulate_tree(tree, 10'000));

    const auto pool = make_cascade_spec(kGeometric, 2.0 / 3.0, PoolMethod{10'000, 4}, 5, workers);
    CHECK(iterate_pool(pool) == reference::iterate_pool(pool));

    const auto raw =
        make_cascade_spec(kGeometric, 2.0 / 3.0, PoolMethod{10'000, 4, false}, 5, workers);
    CHECK(iterate_pool(raw) == reference::iterate_pool(raw));
  }
}

TEST_CASE("normalized pool keeps mean one, raw pool drifts") {
  const auto spec = make_cascade_spec(kGeometric, 2.0 / 3.0, PoolMethod{20'000, 30}, 7);
  const auto s = batch_stats(iterate_pool(spec), {});
  CHECK(std::abs(s.mean - 1.0) < 1e-12);

  // Same streams without the rescale: the mean wanders but stays positive.
  auto raw = spec;
  raw.method = PoolMethod{20'000, 30, false};
  const auto r = batch_stats(iterate_pool(raw), {});
  CHECK(r.mean != s.mean);
  CHECK(r.mean > 0.5);
  CHECK(raw.hash() != spec.hash());
}

TEST_CASE("worker count does not change the output") {
  auto spec = make_cascade_spec(kBinaryTree, 1.0, PoolMethod{20'000, 6}, 9, 1);
  const auto one = iterate_pool(spec);
  spec.worker_count = 4;
  CHECK(iterate_pool(spec) == one);
  CHECK(one.spec_hash() == spec.hash());
  spec.seed = 10;
  CHECK_FALSE(iterate_pool(spec) == one);
}

TEST_CASE("depth zero gives the all-ones batch") {
  const auto spec = make_cascade_spec(kBinaryTree, 1.0, TreeMethod{0});
  const auto batch = simulate_tree(spec, 100);
  for (double v : batch.values()) CHECK(v == 1.0);
}

TEST_CASE("tree moments follow the generation recursion") {
  const int depth = 5;
  const auto spec = make_cascade_spec(kGeometric, 2.0 / 3.0, TreeMethod{depth}, 2);
  const auto batch = simulate_tree(spec, 100'000);
  const auto s = batch_stats(batch, {});
  // Oracle: E Y_{n+1}^2 = (E W^2 / b) E Y_n^2 + E N(N-1) / b^2 with
  // E W^2 = 2, b = 3, E N(N-1) = 18 for this law.
  double m = 1.0;
  for (int i = 0; i < depth; ++i) m = 2.0 / 3.0 * m + 2.0;
  CHECK(generation_second_moment(kGeometric, 2.0 / 3.0, depth) == doctest::Approx(m));
  CHECK(limit_second_moment(kGeometric, 2.0 / 3.0) == doctest::Approx(6.0));
  CHECK(std::abs(s.mean - 1.0) < 5.0 * s.mean_se);
  CHECK(std::abs(s.second_moment - m) < 5.0 * s.second_moment_se);
}

TEST_CASE("batch statistics") {
  const SampleBatch batch({0.0, 1.0, 2.0, 3.0}, 7, 8);
  CHECK(batch.zero_count() == 1);
  CHECK(batch.mean() == 1.5);
  CHECK(batch.second_moment() == 3.5);
  const double grid[] = {0.0, 1.0};
  const auto s = batch_stats(batch, grid);
  CHECK(s.laplace[0].value == 1.0);
  CHECK(s.laplace[0].std_error == 0.0);
  CHECK(s.laplace[1].value ==
        doctest::Approx((1 + std::exp(-1.0) + std::exp(-2.0) + std::exp(-3.0)) / 4));
  CHECK_THROWS_AS(batch_stats(SampleBatch({}, 0, 0), grid), DomainError);
}

TEST_CASE("batch files round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "smoothlab_cascade_test";
  std::filesystem::create_directories(dir);
  const auto spec = make_cascade_spec(kGeometric, 2.0 / 3.0, TreeMethod{3}, 4);
  const auto batch = simulate_tree(spec, 500);
  CHECK(decode_batch_binary(encode_batch_binary(batch), batch.spec_hash(), batch.seed()) == batch);
  CHECK(decode_batch_csv(encode_batch_csv(batch), batch.spec_hash(), batch.seed()) == batch);
  const auto path = dir / "batch.bin";
  write_file_atomically(path, encode_batch_binary(batch));
  write_file_atomically(sidecar_path(path), "{\"spec_hash\": \"" + hash_hex(batch.spec_hash()) +
                                                "\", \"seed\": 4, \"format\": \"binary\"}");
  CHECK(load_batch(path) == batch);
  CHECK(parse_hash_hex(hash_hex(0x0123456789abcdefULL)) == 0x0123456789abcdefULL);
  CHECK_THROWS_AS(decode_batch_binary("garbage", 0, 0), ParseError);
  std::filesystem::remove_all(dir);
}
