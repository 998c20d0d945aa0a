// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "smoothing/random_stream.hpp"

namespace smoothing {

namespace offspring {

/// N = n + 1 almost surely; pgf x^(n+1).
struct Deterministic {
  int n;
};
/// N in {0, 2}; pgf 1 - rho + rho x^2.
struct Binary {
  double rho;
};
/// N in {1, n + 1}; pgf (1 - rho) x + rho x^(n+1).
struct Delayed {
  double rho;
  int n;
};
/// P(N = k) = (1 - p) p^k, k >= 0; pgf (1 - p) / (1 - p x).
struct Geometric {
  double p;
};
/// 1 + Geometric; pgf (1 - p) x / (1 - p x).
struct ShiftedGeometric {
  double p;
};
/// 2 + Geometric; pgf (1 - p) x^2 / (1 - p x).
struct SquareGeometric {
  double p;
};
/// Finite support {0, ..., m} with m < 2^16.
struct GenericPmf {
  std::vector<double> q;
};

}  // namespace offspring

/// Law of the offspring count N, handled through its generating function
/// phi(x) = E x^N. Validated at construction: b = phi'(1) > 1 and phi''(1)
/// finite. Immutable afterwards.
class OffspringLaw {
 public:
  using Variant = std::variant<offspring::Deterministic, offspring::Binary, offspring::Delayed,
                               offspring::Geometric, offspring::ShiftedGeometric,
                               offspring::SquareGeometric, offspring::GenericPmf>;

  static constexpr std::size_t kMaxSupport = std::size_t{1} << 16;

  explicit OffspringLaw(Variant law);

  /// Parses `deterministic:n=2`, `binary:rho=0.8`, `delayed:rho=0.5,n=2`,
  /// `geometric:p=0.75`, `shifted-geometric:p=0.75`,
  /// `square-geometric:p=0.8` or `pmf:0.1,0.2,0.7`.
  static OffspringLaw parse(std::string_view text);

  /// Canonical text form; parse(describe()) reproduces the law exactly.
  std::string describe() const;

  const Variant& variant() const { return law_; }

  double pgf(double x) const;
  double mean() const { return mean_; }
  /// phi''(1) = E N(N-1).
  double factorial_moment2() const { return factorial_moment2_; }
  double probability(std::int64_t k) const;
  double pgf_inverse(double y) const;
  std::int64_t sample(RandomStream& rng) const;

  /// (phi(x) - phi(y)) / (x - y), phi'(x) when x == y; no cancellation.
  double pgf_divided_difference(double x, double y) const;
  /// psi(x) = (1 - phi(x)) / (1 - x), evaluated without cancellation;
  /// psi(1) = b.
  double tail_ratio(double x) const;
  /// chi(x) = (b - psi(x)) / (1 - x), evaluated without cancellation;
  /// chi(1) = phi''(1) / 2.
  double tail_ratio_slope(double x) const;

 private:
  void build_polynomial(std::vector<double> pmf);

  Variant law_;
  double mean_ = 0.0;
  double factorial_moment2_ = 0.0;

  // Polynomial laws only: pmf, coefficients of psi and chi, alias table.
  std::vector<double> pmf_;
  std::vector<double> psi_coef_;
  std::vector<double> chi_coef_;
  std::vector<double> alias_cut_;
  std::vector<std::uint32_t> alias_index_;
};

}  // namespace smoothing
