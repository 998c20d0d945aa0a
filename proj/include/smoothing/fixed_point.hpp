// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "smoothing/offspring.hpp"

namespace smoothing {

struct SolverConfig {
  /// Absolute tolerance of every quadrature.
  double quad_tol = 1e-12;
  /// Relative tolerance on the implicit equation b(1-u)Omega(u) = t.
  double root_tol = 1e-13;
  /// Half-width around x = 1 where omega returns its limit value.
  double singular_window = 1e-6;
  /// Upper end of default tabulation grids.
  double t_max = 20.0;

  /// Throws ValidationError unless 0 < root_tol < sqrt(quad_tol) and
  /// 0 < singular_window < 1e-3.
  void validate() const;
};

/// Unique fixed point in [0, 1) of t -> phi(alpha t + 1 - alpha), i.e.
/// P(Y = 0). Requires alpha b > 1. Values alpha > 1 are accepted as an
/// analytic continuation (signed weight measure) as long as the fixed point
/// keeps alpha t + 1 - alpha inside [0, 1].
double extinction_beta(const OffspringLaw& offspring, double alpha);

/// Semi-analytic solver for the power-law weight family: omega, Omega and
/// the inversion of b (1 - u) Omega(u) = t, giving u(t) and g(t) = phi(u(t)).
///
/// Omega is served from a table of cumulative integrals of omega on knots
/// graded geometrically toward the pole at phi^{-1}(beta); a query adds one
/// local quadrature from the nearest knot, so the table introduces no
/// interpolation error. Immutable after construction; concurrent const
/// calls are safe.
class FixedPointSolver {
 public:
  FixedPointSolver(OffspringLaw offspring, double alpha, SolverConfig config = {});

  const OffspringLaw& offspring() const { return offspring_; }
  const SolverConfig& config() const { return config_; }
  double alpha() const { return alpha_; }
  double b() const { return offspring_.mean(); }
  double gamma() const { return 1.0 - 1.0 / (alpha_ * b() - 1.0); }
  double beta() const { return beta_; }
  /// phi^{-1}(beta) = alpha beta + 1 - alpha, the limit of u(t) as t -> inf.
  double lower_bound() const { return lower_bound_; }

  /// omega(x) = (alpha b - 1)/(alpha phi(x) - x + 1 - alpha) + 1/(1 - x),
  /// computed in a cancellation-free form; the limit value inside the
  /// singular window. Domain (lower_bound, 1].
  double omega(double x) const;
  /// -alpha phi''(1) / (2 (alpha b - 1)).
  double omega_limit() const;
  double log_omega_cap(double x) const;
  double omega_cap(double x) const;

  /// Unique u in (lower_bound, 1] with b (1 - u) Omega(u) = t.
  double solve_u(double t) const;
  double g(double t) const { return offspring_.pgf(solve_u(t)); }

  /// |(alpha b - 1) u'(t) - (alpha phi(u) - u + 1 - alpha) / t| with u'
  /// by central differences of step h; needs t > h.
  double ode_residual(double t, double h = 1e-4) const;

  /// |b (1 - u) Omega(u) - t|.
  double implicit_residual(double t, double u) const;

  /// |g(t) - phi(1 - alpha + alpha (1-gamma) b^(gamma-1) int_0^b g(t x/b) x^(-gamma) dx)|
  /// for an arbitrary candidate transform.
  double laplace_residual(const std::function<double(double)>& g, double t) const;
  /// Same with the solver's own g.
  double laplace_residual(double t) const;

 private:
  double omega_at(double x, double offset) const;
  // Integral of omega between two offsets from lower_bound.
  double integrate_omega(double from, double to) const;

  OffspringLaw offspring_;
  double alpha_;
  SolverConfig config_;
  double beta_;
  double lower_bound_;
  // Knots lower_bound + offsets_[k], offsets_[0] = 1 - lower_bound > ...;
  // log_omega_[k] = log Omega at knot k.
  std::vector<double> offsets_;
  std::vector<double> log_omega_;
};

struct SolveRow {
  double t, u, g, implicit_residual, laplace_residual;
};

std::vector<SolveRow> tabulate(const FixedPointSolver& solver, std::span<const double> t_grid,
                               bool with_laplace_residual = true);

// Free-function forms.
double omega_eval(const OffspringLaw& offspring, double alpha, double x);
double omega_cap(const OffspringLaw& offspring, double alpha, double x,
                 const SolverConfig& cfg = {});
double solve_u(const OffspringLaw& offspring, double alpha, double t,
               const SolverConfig& cfg = {});
double g_of_t(const OffspringLaw& offspring, double alpha, double t,
              const SolverConfig& cfg = {});
double laplace_residual(const OffspringLaw& offspring, double alpha, double t,
                        const SolverConfig& cfg = {});

}  // namespace smoothing
