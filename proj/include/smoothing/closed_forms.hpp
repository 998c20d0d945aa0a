// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "smoothing/offspring.hpp"

namespace smoothing {

/// Parameters of the six worked examples. Only the fields an example uses
/// are read: 1 (n), 2 (rho, alpha), 3 (rho, n), 4 (p), 5 (p), 6 (p).
struct ExampleParams {
  int n = 1;
  double rho = 0.9;
  double p = 0.75;
  double alpha = 1.0;
};

/// Default parameter set used by the CLI and the verification matrix.
ExampleParams default_example_params(int id);

/// Exact solution of one worked example: the law nu of Y as an atom at 0
/// plus a continuous density, its Laplace transform g and u = phi^{-1}(g).
///
///   1  phi = x^(n+1), alpha = 1                 Y ~ Gamma((n+1)/n, rate (n+1)/n)
///   2  phi = 1 - rho + rho x^2, 1/(2rho) < alpha <= 1
///   3  phi = (1-rho) x + rho x^(n+1), alpha = 1  mixture of two Gammas
///   4  phi = (1-p)/(1-px), alpha = 2(1-p)/p     g = 1/2 + 1/(2 sqrt(4t+1))
///   5  phi = (1-p)x/(1-px), alpha = 2(1-p)
///   6  phi = (1-p)x^2/(1-px), alpha = -2p(1-p)/(2p^2-4p+1)
///
/// Example 6 is normalized to E Y = 1: its transform is
/// G(4pt) where G is the erfc-type solution with mean 1/(4p).
class AnalyticSolution {
 public:
  int example_id() const { return id_; }
  const ExampleParams& params() const { return params_; }
  const OffspringLaw& offspring() const { return offspring_; }
  double alpha() const { return alpha_; }
  double b() const { return offspring_.mean(); }
  double gamma() const { return 1.0 - 1.0 / (alpha_ * b() - 1.0); }
  double beta() const { return atom_; }
  double atom() const { return atom_; }
  /// False when alpha > 1 (Example 4 with p < 2/3): the weight measure has a
  /// negative atom, so only the analytic routes apply.
  bool simulable() const { return alpha_ <= 1.0; }

  double g(double t) const;
  double u(double t) const;
  /// Continuous part of nu; s > 0.
  double density(double s) const;
  /// atom + int_0^s density.
  double cdf(double s) const;
  /// cdf at each point of an ascending sequence, integrating incrementally.
  std::vector<double> cdf_sorted(std::span<const double> ascending) const;

  /// int_0^inf s^k density(s) ds.
  double density_moment(int k) const;
  /// atom + int_0^inf exp(-t s) density(s) ds.
  double density_laplace(double t) const;

  /// E N(N-1) / (b (b - E W^2)).
  double second_moment_formula() const;
  /// Both routes; throws Error if they differ by more than 1e-8 (relative).
  double second_moment() const;

  /// One-line description such as "Example 1 (n=1): Y ~ Gamma(2, 2)".
  std::string describe() const;

  friend AnalyticSolution make_example(int id, const ExampleParams& params);

 private:
  AnalyticSolution(int id, ExampleParams params, OffspringLaw offspring, double alpha,
                   double atom);
  /// int_from^to weight(s) density(s) ds with s = v^m removing the
  /// endpoint singularity at 0; `to` may be +inf.
  double integrate_density(const std::function<double(double)>& weight, double from,
                           double to) const;
  double printed_example6_density(double s) const;

  int id_;
  ExampleParams params_;
  OffspringLaw offspring_;
  double alpha_;
  double atom_;
  int substitution_power_ = 2;
};

/// Validates each example's constraints eagerly (error messages name the
/// violated inequality) and returns the solution. Example 2 runs a
/// self-test of its density against its transform.
AnalyticSolution make_example(int id, const ExampleParams& params);

/// Example 2's exponential rate 4 rho - 2/alpha.
double example2_rate(double rho, double alpha);
/// Example 6's alpha = -2p(1-p)/(2p^2-4p+1).
double example6_alpha(double p);

struct AdmissibilityPoint {
  double p;
  double alpha;
  bool admissible;  // 1/b < alpha <= 1
};
/// Scans p over (0, 1) on `points` interior grid points for Example 6.
std::vector<AdmissibilityPoint> scan_example6_admissibility(int points);

struct NonInjectivityReport {
  std::string spec1, spec2;  // offspring and alpha of each Example-4 instance
  double alpha1, alpha2;
  std::vector<double> t_grid;
  /// sup |g1 - g2| of the printed transforms (identical formula).
  double analytic_sup;
  /// sup |g1 - g2| from the general solver run on each instance.
  double solver_sup;
};

/// Two Example-4 instances (different N and mu) sharing one law of Y.
/// Requires p1, p2 in (1/2, 1) and p1 != p2.
NonInjectivityReport non_injectivity_witness(double p1, double p2);

}  // namespace smoothing
