// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "smoothing/offspring.hpp"
#include "smoothing/random_stream.hpp"
#include "smoothing/weights.hpp"

namespace smoothing {

/// Exact evaluation of Y_depth on a freshly sampled Galton-Watson tree.
struct TreeMethod {
  int depth = 0;
};

/// Distributional iteration of the smoothing map on a pool of `pool_size`
/// values, `iterations` synchronous generations.
///
/// The fixed points form a scale family, so with plain resampling the pool
/// mean performs an undamped random walk (sd ~ sqrt(K Var Y / M)). With
/// `normalize` each generation is rescaled to empirical mean 1, which pins
/// the E Y = 1 member at an O(1/M) cost.
struct PoolMethod {
  std::int64_t pool_size = 0;
  int iterations = 0;
  bool normalize = true;
};

using Method = std::variant<TreeMethod, PoolMethod>;

/// Parses `tree:depth=12` or `pool:M=200000,K=50`.
Method parse_method(std::string_view text);
std::string describe_method(const Method& method);

/// Arbitrary weight sampler for experiments outside the power-law family.
/// No analytic route exists for these; runs are simulation-only.
struct CustomWeights {
  std::string name;
  std::function<double(RandomStream&)> sample;
};

using WeightModel = std::variant<WeightLaw, CustomWeights>;

/// One instance of the fixed-point equation plus simulation parameters.
struct CascadeSpec {
  OffspringLaw offspring;
  WeightModel weights;
  Method method;
  std::uint64_t seed = 1;
  int worker_count = 1;
  /// Hard cap on expanded nodes per tree sample.
  std::uint64_t node_budget = 1'000'000'000ULL;

  double b() const { return offspring.mean(); }
  bool analytic() const { return std::holds_alternative<WeightLaw>(weights); }
  /// Canonical description (offspring, weights, method); excludes seed and
  /// worker_count.
  std::string describe() const;
  /// FNV-1a 64 of describe().
  std::uint64_t hash() const;
};

/// Builds a spec with the power-law weights for `alpha`; b is taken from
/// the offspring law.
CascadeSpec make_cascade_spec(const OffspringLaw& offspring, double alpha, Method method,
                              std::uint64_t seed = 1, int worker_count = 1);

/// Checks b-consistency, worker_count >= 1 and the resource guard
/// (expected expanded nodes per tree sample <= 1e8). Throws
/// ValidationError / ResourceError.
void validate(const CascadeSpec& spec);

class SampleBatch {
 public:
  SampleBatch() = default;
  SampleBatch(std::vector<double> values, std::uint64_t spec_hash, std::uint64_t seed);

  std::span<const double> values() const { return values_; }
  std::int64_t count() const { return static_cast<std::int64_t>(values_.size()); }
  std::int64_t zero_count() const { return zero_count_; }
  double sum() const { return sum_; }
  double sum_sq() const { return sum_sq_; }
  double mean() const { return sum_ / static_cast<double>(values_.size()); }
  double second_moment() const { return sum_sq_ / static_cast<double>(values_.size()); }
  double zero_fraction() const {
    return static_cast<double>(zero_count_) / static_cast<double>(values_.size());
  }
  std::uint64_t spec_hash() const { return spec_hash_; }
  std::uint64_t seed() const { return seed_; }

  friend bool operator==(const SampleBatch&, const SampleBatch&) = default;

 private:
  std::vector<double> values_;
  std::int64_t zero_count_ = 0;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
  std::uint64_t spec_hash_ = 0;
  std::uint64_t seed_ = 0;
};

/// Samples per chunk; chunk c draws from RandomStream(seed, c, tag).
inline constexpr std::int64_t kChunkSize = 4096;

/// `count` independent samples of Y_depth; OpenMP-parallel over chunks.
/// Bit-identical for any worker_count.
SampleBatch simulate_tree(const CascadeSpec& spec, std::int64_t count);

/// Final pool of the distributional iteration; OpenMP-parallel over chunks.
/// Generation k uses tag k. Bit-identical for any worker_count.
SampleBatch iterate_pool(const CascadeSpec& spec);

/// Dispatches on spec.method; `count` is used by the tree method only.
SampleBatch simulate(const CascadeSpec& spec, std::int64_t count);

/// Serial reference implementations with the same stream layout: the tree
/// sampler is the plain recursive definition, the pool a single loop. Kept
/// for testing and benchmarking the parallel kernels.
namespace reference {
SampleBatch simulate_tree(const CascadeSpec& spec, std::int64_t count);
SampleBatch iterate_pool(const CascadeSpec& spec);
}  // namespace reference

struct LaplacePoint {
  double t = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

struct BatchSummary {
  std::int64_t count = 0;
  double mean = 0.0;
  double mean_se = 0.0;
  double second_moment = 0.0;
  double second_moment_se = 0.0;
  double zero_fraction = 0.0;
  std::vector<LaplacePoint> laplace;
};

/// Moments, zero fraction and the empirical Laplace transform
/// mean(exp(-t Y)) with per-point standard errors.
BatchSummary batch_stats(const SampleBatch& batch, std::span<const double> t_grid);

/// Exact E Y_n^2 from the recursion m(n+1) = E W^2 m(n) / b + E N(N-1) / b^2,
/// m(0) = 1.
double generation_second_moment(const OffspringLaw& offspring, double alpha, int generations);

/// E N(N-1) / (b (b - E W^2)), the L^2 limit of the recursion above.
double limit_second_moment(const OffspringLaw& offspring, double alpha);

}  // namespace smoothing
