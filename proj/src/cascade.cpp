// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothing/cascade.hpp"

#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "smoothing/errors.hpp"
#include "smoothing/text_util.hpp"

namespace smoothing {

// ---------------------------------------------------------------------------
// Spec

Method parse_method(std::string_view text) {
  const auto colon = text.find(':');
  const std::string family = to_lower(trim(text.substr(0, colon)));
  const auto kv = parse_key_values(colon == std::string_view::npos ? std::string_view{}
                                                                   : text.substr(colon + 1),
                                   ',');
  auto get = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      throw ParseError("method '" + family + "' needs parameter '" + key + "'");
    }
    return it->second;
  };
  if (family == "tree") {
    if (kv.size() != 1) throw ParseError("method: expected 'tree:depth=<d>'");
    const int depth = parse_int(get("depth"), "depth");
    if (depth < 0) throw ValidationError("method: tree depth must be >= 0");
    return TreeMethod{depth};
  }
  if (family == "pool") {
    const bool has_flag = kv.count("normalize") != 0;
    if (kv.size() != (has_flag ? 3u : 2u)) {
      throw ParseError("method: expected 'pool:M=<size>,K=<iterations>[,normalize=0|1]'");
    }
    const auto size = parse_int64(get("m"), "M");
    const int iterations = parse_int(get("k"), "K");
    if (iterations < 0) throw ValidationError("method: pool iterations K must be >= 0");
    bool normalize = true;
    if (has_flag) {
      const int flag = parse_int(get("normalize"), "normalize");
      if (flag != 0 && flag != 1) throw ParseError("method: normalize must be 0 or 1");
      normalize = flag == 1;
    }
    return PoolMethod{size, iterations, normalize};
  }
  throw ParseError("method: unknown family '" + family + "' (expected tree or pool)");
}

std::string describe_method(const Method& method) {
  if (const auto* tree = std::get_if<TreeMethod>(&method)) {
    return "tree:depth=" + std::to_string(tree->depth);
  }
  const auto& pool = std::get<PoolMethod>(method);
  return "pool:M=" + std::to_string(pool.pool_size) + ",K=" + std::to_string(pool.iterations) +
         (pool.normalize ? "" : ",normalize=0");
}

std::string CascadeSpec::describe() const {
  std::string w;
  if (const auto* law = std::get_if<WeightLaw>(&weights)) {
    w = law->describe();
  } else {
    w = "custom:" + std::get<CustomWeights>(weights).name;
  }
  return "offspring=" + offspring.describe() + ";" + w + ";method=" + describe_method(method);
}

std::uint64_t CascadeSpec::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : describe()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

CascadeSpec make_cascade_spec(const OffspringLaw& offspring, double alpha, Method method,
                              std::uint64_t seed, int worker_count) {
  CascadeSpec spec{offspring, weight_law_from(alpha, offspring.mean()), method, seed,
                   worker_count};
  validate(spec);
  return spec;
}

void validate(const CascadeSpec& spec) {
  if (spec.worker_count < 1) throw ValidationError("cascade: worker_count must be >= 1");
  double expansion = spec.b();
  if (const auto* law = std::get_if<WeightLaw>(&spec.weights)) {
    if (std::abs(law->b() - spec.b()) > 1e-12 * spec.b()) {
      std::ostringstream msg;
      msg << "cascade: weight law b = " << law->b() << " differs from offspring mean "
          << spec.b();
      throw ValidationError(msg.str());
    }
    expansion = law->alpha() * spec.b();
  } else if (!std::get<CustomWeights>(spec.weights).sample) {
    throw ValidationError("cascade: custom weights need a sampler");
  }
  if (const auto* tree = std::get_if<TreeMethod>(&spec.method)) {
    if (tree->depth < 0) throw ValidationError("cascade: tree depth must be >= 0");
    if (tree->depth * std::log(expansion) > std::log(1e8)) {
      std::ostringstream msg;
      msg << "cascade: expected tree size " << expansion << "^" << tree->depth
          << " exceeds the 1e8 node guard";
      throw ResourceError(msg.str());
    }
  } else {
    const auto& pool = std::get<PoolMethod>(spec.method);
    if (pool.pool_size < 10'000) {
      throw ValidationError("cascade: pool size M must be >= 1e4 (resampling bias)");
    }
    if (pool.iterations < 0) throw ValidationError("cascade: pool iterations must be >= 0");
  }
}

// ---------------------------------------------------------------------------
// Batches

namespace {

struct Compensated {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

SampleBatch::SampleBatch(std::vector<double> values, std::uint64_t spec_hash, std::uint64_t seed)
    : values_(std::move(values)), spec_hash_(spec_hash), seed_(seed) {
  Compensated s, s2;
  for (double v : values_) {
    if (!(v >= 0.0)) throw DomainError("batch: values must be finite and >= 0");
    if (v == 0.0) ++zero_count_;
    s.add(v);
    s2.add(v * v);
  }
  sum_ = s.value();
  sum_sq_ = s2.value();
}

BatchSummary batch_stats(const SampleBatch& batch, std::span<const double> t_grid) {
  if (batch.count() == 0) throw DomainError("batch_stats: empty batch");
  const auto values = batch.values();
  const double n = static_cast<double>(batch.count());
  BatchSummary out;
  out.count = batch.count();
  out.mean = batch.mean();
  out.second_moment = batch.second_moment();
  out.zero_fraction = batch.zero_fraction();

  Compensated fourth;
  for (double v : values) {
    const double v2 = v * v;
    fourth.add(v2 * v2);
  }
  const double var = std::max(0.0, out.second_moment - out.mean * out.mean);
  const double var2 = std::max(0.0, fourth.value() / n - out.second_moment * out.second_moment);
  const double scale = n > 1.0 ? n / (n - 1.0) : 1.0;
  out.mean_se = std::sqrt(var * scale / n);
  out.second_moment_se = std::sqrt(var2 * scale / n);

  out.laplace.reserve(t_grid.size());
  for (double t : t_grid) {
    Compensated acc, acc2;
    for (double v : values) {
      const double e = std::exp(-t * v);
      acc.add(e);
      acc2.add(e * e);
    }
    const double m = acc.value() / n;
    const double v = std::max(0.0, acc2.value() / n - m * m);
    out.laplace.push_back({t, m, std::sqrt(v * scale / n)});
  }
  return out;
}

double generation_second_moment(const OffspringLaw& offspring, double alpha, int generations) {
  const double b = offspring.mean();
  const double ew2 = power_law_moment(alpha, b, 2);
  double m = 1.0;
  for (int n = 0; n < generations; ++n) {
    m = ew2 * m / b + offspring.factorial_moment2() / (b * b);
  }
  return m;
}

double limit_second_moment(const OffspringLaw& offspring, double alpha) {
  const double b = offspring.mean();
  return offspring.factorial_moment2() / (b * (b - power_law_moment(alpha, b, 2)));
}

// ---------------------------------------------------------------------------
// Kernels

namespace {

/// Invokes fn with a callable RandomStream& -> double drawing one weight.
template <class Fn>
decltype(auto) with_weight_sampler(const CascadeSpec& spec, Fn&& fn) {
  if (const auto* law = std::get_if<WeightLaw>(&spec.weights)) {
    return fn([law](RandomStream& rng) { return law->sample(rng); });
  }
  const auto& custom = std::get<CustomWeights>(spec.weights);
  return fn([&custom](RandomStream& rng) { return custom.sample(rng); });
}

struct Frame {
  std::int64_t remaining;
  double sum;
  double weight;  // weight of the child currently being evaluated
};

/// Depth-first evaluation of Y_depth with an explicit stack. Children with a
/// zero weight are not expanded; the draw order matches the recursive
/// reference exactly.
template <class SampleW>
double tree_sample(int depth, const OffspringLaw& offspring, const SampleW& sample_w, double b,
                   std::uint64_t node_budget, RandomStream& rng, std::vector<Frame>& stack) {
  if (depth == 0) return 1.0;
  stack.clear();
  stack.push_back({offspring.sample(rng), 0.0, 0.0});
  std::uint64_t nodes = 1;
  while (true) {
    Frame& top = stack.back();
    if (top.remaining == 0) {
      const double value = top.sum / b;
      stack.pop_back();
      if (stack.empty()) return value;
      Frame& parent = stack.back();
      parent.sum += parent.weight * value;
      continue;
    }
    --top.remaining;
    const double w = sample_w(rng);
    if (w == 0.0) continue;
    const int child_depth = depth - static_cast<int>(stack.size());
    if (child_depth == 0) {
      top.sum += w * 1.0;
      continue;
    }
    top.weight = w;
    if (++nodes > node_budget) {
      throw ResourceError("simulate_tree: node budget exceeded for one sample");
    }
    stack.push_back({offspring.sample(rng), 0.0, 0.0});
  }
}

template <class SampleW>
double tree_sample_recursive(int depth, const OffspringLaw& offspring, const SampleW& sample_w,
                             double b, RandomStream& rng) {
  if (depth == 0) return 1.0;
  const std::int64_t n = offspring.sample(rng);
  double sum = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    const double w = sample_w(rng);
    if (w == 0.0) continue;
    sum += w * (depth == 1 ? 1.0 : tree_sample_recursive(depth - 1, offspring, sample_w, b, rng));
  }
  return sum / b;
}

template <class SampleW>
void pool_generation_chunk(const OffspringLaw& offspring, const SampleW& sample_w, double b,
                           std::span<const double> previous, std::span<double> next,
                           std::int64_t begin, std::int64_t end, RandomStream& rng) {
  const auto pool_size = static_cast<std::uint64_t>(previous.size());
  for (std::int64_t i = begin; i < end; ++i) {
    const std::int64_t n = offspring.sample(rng);
    double sum = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
      const double w = sample_w(rng);
      if (w == 0.0) continue;
      sum += w * previous[rng.uniform_index(pool_size)];
    }
    next[static_cast<std::size_t>(i)] = sum / b;
  }
}

std::int64_t chunk_count(std::int64_t count) { return (count + kChunkSize - 1) / kChunkSize; }

// Per-chunk sums combined in chunk order, so the result does not depend on
// the worker count. Shared with the serial reference.
double chunk_ordered_mean(std::span<const double> chunk_sums, std::size_t count) {
  Compensated total;
  for (double s : chunk_sums) total.add(s);
  return total.value() / static_cast<double>(count);
}

double chunk_sum(std::span<const double> values, std::int64_t begin, std::int64_t end) {
  Compensated acc;
  for (std::int64_t i = begin; i < end; ++i) acc.add(values[static_cast<std::size_t>(i)]);
  return acc.value();
}

void rescale(std::span<double> values, std::span<const double> chunk_sums) {
  const double mean = chunk_ordered_mean(chunk_sums, values.size());
  if (!(mean > 0.0)) throw DomainError("iterate_pool: pool collapsed to zero");
  for (double& v : values) v /= mean;
}

/// Runs body(chunk) for every chunk on `workers` threads and rethrows the
/// first failure after the parallel region.
template <class Body>
void for_each_chunk(std::int64_t chunks, int workers, Body&& body) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::int64_t c = 0; c < chunks; ++c) {
    try {
      body(c);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

const TreeMethod& tree_method(const CascadeSpec& spec) {
  const auto* tree = std::get_if<TreeMethod>(&spec.method);
  if (!tree) throw ValidationError("simulate_tree: spec method is not tree");
  return *tree;
}

const PoolMethod& pool_method(const CascadeSpec& spec) {
  const auto* pool = std::get_if<PoolMethod>(&spec.method);
  if (!pool) throw ValidationError("iterate_pool: spec method is not pool");
  return *pool;
}

}  // namespace

SampleBatch simulate_tree(const CascadeSpec& spec, std::int64_t count) {
  validate(spec);
  const int depth = tree_method(spec).depth;
  if (count < 0) throw ValidationError("simulate_tree: count must be >= 0");
  std::vector<double> values(static_cast<std::size_t>(count));
  const double b = spec.b();
  with_weight_sampler(spec, [&](auto sample_w) {
    for_each_chunk(chunk_count(count), spec.worker_count, [&](std::int64_t c) {
      RandomStream rng(spec.seed, static_cast<std::uint32_t>(c), 0);
      std::vector<Frame> stack;
      stack.reserve(static_cast<std::size_t>(depth) + 1);
      const std::int64_t end = std::min(count, (c + 1) * kChunkSize);
      for (std::int64_t i = c * kChunkSize; i < end; ++i) {
        values[static_cast<std::size_t>(i)] =
            tree_sample(depth, spec.offspring, sample_w, b, spec.node_budget, rng, stack);
      }
    });
  });
  return SampleBatch(std::move(values), spec.hash(), spec.seed);
}

SampleBatch iterate_pool(const CascadeSpec& spec) {
  validate(spec);
  const auto& pool = pool_method(spec);
  const double b = spec.b();
  std::vector<double> current(static_cast<std::size_t>(pool.pool_size), 1.0);
  std::vector<double> next(current.size());
  std::vector<double> sums(static_cast<std::size_t>(chunk_count(pool.pool_size)));
  with_weight_sampler(spec, [&](auto sample_w) {
    for (int k = 1; k <= pool.iterations; ++k) {
      for_each_chunk(chunk_count(pool.pool_size), spec.worker_count, [&](std::int64_t c) {
        RandomStream rng(spec.seed, static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(k));
        const std::int64_t end = std::min(pool.pool_size, (c + 1) * kChunkSize);
        pool_generation_chunk(spec.offspring, sample_w, b, current, next, c * kChunkSize, end,
                              rng);
        sums[static_cast<std::size_t>(c)] = chunk_sum(next, c * kChunkSize, end);
      });
      if (pool.normalize) rescale(next, sums);
      current.swap(next);
    }
  });
  return SampleBatch(std::move(current), spec.hash(), spec.seed);
}

SampleBatch simulate(const CascadeSpec& spec, std::int64_t count) {
  if (std::holds_alternative<TreeMethod>(spec.method)) return simulate_tree(spec, count);
  return iterate_pool(spec);
}

namespace reference {

SampleBatch simulate_tree(const CascadeSpec& spec, std::int64_t count) {
  validate(spec);
  const int depth = tree_method(spec).depth;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(count));
  const double b = spec.b();
  with_weight_sampler(spec, [&](auto sample_w) {
    for (std::int64_t c = 0; c < chunk_count(count); ++c) {
      RandomStream rng(spec.seed, static_cast<std::uint32_t>(c), 0);
      const std::int64_t end = std::min(count, (c + 1) * kChunkSize);
      for (std::int64_t i = c * kChunkSize; i < end; ++i) {
        values.push_back(tree_sample_recursive(depth, spec.offspring, sample_w, b, rng));
      }
    }
  });
  return SampleBatch(std::move(values), spec.hash(), spec.seed);
}

SampleBatch iterate_pool(const CascadeSpec& spec) {
  validate(spec);
  const auto& pool = pool_method(spec);
  const double b = spec.b();
  std::vector<double> current(static_cast<std::size_t>(pool.pool_size), 1.0);
  std::vector<double> next(current.size());
  with_weight_sampler(spec, [&](auto sample_w) {
    std::optional<RandomStream> rng;
    for (int k = 1; k <= pool.iterations; ++k) {
      for (std::int64_t i = 0; i < pool.pool_size; ++i) {
        if (i % kChunkSize == 0) {
          rng.emplace(spec.seed, static_cast<std::uint32_t>(i / kChunkSize),
                      static_cast<std::uint32_t>(k));
        }
        const std::int64_t n = spec.offspring.sample(*rng);
        double sum = 0.0;
        for (std::int64_t j = 0; j < n; ++j) {
          const double w = sample_w(*rng);
          if (w != 0.0) sum += w * current[rng->uniform_index(current.size())];
        }
        next[static_cast<std::size_t>(i)] = sum / b;
      }
      if (pool.normalize) {
        std::vector<double> sums;
        for (std::int64_t c = 0; c < chunk_count(pool.pool_size); ++c) {
          const std::int64_t end = std::min(pool.pool_size, (c + 1) * kChunkSize);
          sums.push_back(chunk_sum(next, c * kChunkSize, end));
        }
        rescale(next, sums);
      }
      current.swap(next);
    }
  });
  return SampleBatch(std::move(current), spec.hash(), spec.seed);
}

}  // namespace reference

}  // namespace smoothing
