// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "smoothing/cascade.hpp"
#include "smoothing/closed_forms.hpp"
#include "smoothing/errors.hpp"

namespace smoothing {

/// Outcome of one statistical check. For sentinel records the underlying
/// check is expected to fail, and `pass` is true when it did.
struct TestRecord {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::vector<double> std_errors;
  std::string detail;
  bool sentinel = false;
};

struct VerificationReport {
  std::uint64_t spec_hash = 0;
  std::vector<TestRecord> records;

  /// True iff every record passes (and there is at least one).
  bool pass() const;
  std::string to_json() const;
  /// Fixed-width table, one row per record, then the verdict.
  std::string summary_table() const;
};

/// Insufficient data for a goodness-of-fit test.
class InsufficientDataError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct LaplaceGate {
  double se_multiple = 5.0;
  double abs_cap = 0.005;
};

/// Empirical Laplace transform of `batch` against `g` on `t_grid` (inside
/// [0, 20]). statistic = sup |g_hat - g|; each point must lie within
/// se_multiple standard errors and within abs_cap.
TestRecord compare_laplace(const SampleBatch& batch, const std::function<double(double)>& g,
                           std::span<const double> t_grid, const LaplaceGate& gate = {});

/// The 0.005 cap is a budget for batches of kCapReferenceCount values;
/// smaller batches get it widened by sqrt(kCapReferenceCount / n) so the cap
/// stays near 5 SE instead of rejecting on noise.
inline constexpr double kCapReferenceCount = 200'000.0;
LaplaceGate scaled_gate(std::size_t count);

/// Two batches against each other; each point must agree within
/// se_multiple combined standard errors.
TestRecord compare_laplace_batches(const SampleBatch& a, const SampleBatch& b,
                                   std::span<const double> t_grid, double se_multiple = 5.0);

/// Upper tail of the asymptotic Kolmogorov distribution, P(K > x).
double kolmogorov_sf(double x);
/// x with P(K > x) = level.
double kolmogorov_critical(double level);
/// Two-sided standard normal critical value for `level`.
double normal_critical(double level);

struct KsOptions {
  /// Pool batches are correlated through resampling; thresholds double.
  bool pool = false;
  double level = 0.01;
  /// Known deterministic shortfall of the zero fraction (finite depth).
  double atom_allowance = 0.0;
};

/// KS statistic of the nonzero values against the conditional law
/// (cdf - atom) / (1 - atom), combined with a binomial test of the zero
/// count against the atom. Needs >= 1000 nonzero values.
TestRecord ks_continuous(const SampleBatch& batch, const AnalyticSolution& sol,
                         const KsOptions& options = {});

/// z-scores of the sample mean against 1 and of the sample second moment
/// against E N(N-1) / (b (b - E W^2)); passes when both |z| <= 5.
TestRecord moment_check(const SampleBatch& batch, const CascadeSpec& spec);

/// P(Y_n = 0) for a cascade started from Y_0 = 1: n iterations of
/// t -> phi(alpha t + 1 - alpha) from 0.
double generation_extinction(const OffspringLaw& offspring, double alpha, int generations);

/// Zero fraction against beta within 5 binomial standard errors plus the
/// exact finite-generation shortfall of the method.
TestRecord extinction_check(const SampleBatch& batch, const CascadeSpec& spec);

struct MatrixOptions {
  int tree_depth = 12;
  std::int64_t tree_count = 20'000;
  std::int64_t pool_size = 200'000;
  int pool_iterations = 50;
  bool pool_normalize = true;
  std::uint64_t seed = 1;
  int worker_count = 1;
  std::vector<double> t_grid;  // empty: 20 log points in [0.01, 20]
};

/// Six examples (default parameters) x {tree, pool} x {laplace, ks,
/// moments, extinction}, plus the sentinel records.
VerificationReport run_matrix(const MatrixOptions& options = {});

/// Sentinels alone: wrong distribution (all ones against Example 1's g),
/// cross-example (Example 1 samples against Example 4's law) and the
/// depth-0 second-moment check.
std::vector<TestRecord> sentinel_records(const MatrixOptions& options = {});

}  // namespace smoothing
