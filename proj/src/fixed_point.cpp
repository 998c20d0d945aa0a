// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothing/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "smoothing/errors.hpp"
#include "smoothing/quadrature.hpp"

namespace smoothing {

void SolverConfig::validate() const {
  if (!(root_tol > 0.0) || !(root_tol < std::sqrt(quad_tol))) {
    throw ValidationError("solver config: need 0 < root_tol < sqrt(quad_tol)");
  }
  if (!(singular_window > 0.0) || !(singular_window < 1e-3)) {
    throw ValidationError("solver config: need 0 < singular_window < 1e-3");
  }
  if (!(t_max > 0.0)) throw ValidationError("solver config: need t_max > 0");
}

double extinction_beta(const OffspringLaw& offspring, double alpha) {
  const double b = offspring.mean();
  if (!(alpha > 0.0) || !(alpha * b > 1.0)) {
    std::ostringstream msg;
    msg << "extinction_beta: alpha*b = " << alpha * b << " must exceed 1";
    throw ValidationError(msg.str());
  }
  auto excess = [&](double t) {
    const double x = std::clamp(alpha * t + 1.0 - alpha, 0.0, 1.0);
    return offspring.pgf(x) - t;
  };
  // For alpha > 1 the argument leaves [0, 1] below (alpha - 1)/alpha.
  const double t_min = alpha > 1.0 ? (alpha - 1.0) / alpha : 0.0;
  const double at_min = excess(t_min);
  if (at_min == 0.0) return t_min;
  if (at_min < 0.0) {
    throw DomainError("extinction_beta: fixed point lies outside the continuation domain");
  }
  // excess is convex, zero at 1 with slope alpha b - 1 > 0: negative just
  // below 1 and positive at t_min.
  double gap = 0.5 * (1.0 - t_min);
  while (excess(1.0 - gap) >= 0.0) {
    gap *= 0.5;
    if (gap < 1e-300) throw ConvergenceError("extinction_beta: no sign change below 1");
  }
  double lo = t_min;
  double hi = 1.0 - gap;
  double f_lo = at_min;
  double f_hi = excess(hi);
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = excess(mid);
    if (f_mid == 0.0) return mid;
    if (f_mid > 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  return std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
}

FixedPointSolver::FixedPointSolver(OffspringLaw offspring, double alpha, SolverConfig config)
    : offspring_(std::move(offspring)), alpha_(alpha), config_(config) {
  config_.validate();
  beta_ = extinction_beta(offspring_, alpha_);
  lower_bound_ = alpha_ * beta_ + 1.0 - alpha_;

  const double span = 1.0 - lower_bound_;
  const double closest =
      std::max(1e-12 * span, 64.0 * std::numeric_limits<double>::epsilon() * lower_bound_);
  offsets_.push_back(span);
  log_omega_.push_back(0.0);
  for (int k = 1;; ++k) {
    const double distance = span * std::exp2(-0.25 * k);
    if (distance < closest) break;
    log_omega_.push_back(log_omega_.back() - integrate_omega(distance, offsets_.back()));
    offsets_.push_back(distance);
  }
}

double FixedPointSolver::omega_limit() const {
  return -alpha_ * offspring_.factorial_moment2() / (2.0 * (alpha_ * b() - 1.0));
}

double FixedPointSolver::omega(double x) const {
  if (!(x > lower_bound_ && x <= 1.0)) {
    std::ostringstream msg;
    msg << "omega: x = " << x << " outside (" << lower_bound_ << ", 1]";
    throw DomainError(msg.str());
  }
  return omega_at(x, x - lower_bound_);
}

double FixedPointSolver::omega_at(double x, double offset) const {
  if (1.0 - x <= config_.singular_window) return omega_limit();
  if (x < 0.5 * (lower_bound_ + 1.0)) {
    // alpha phi(x) - x + 1 - alpha vanishes at lower_bound; factor the zero
    // out through a divided difference so the pole carries no cancellation.
    const double slope =
        alpha_ * offspring_.pgf_divided_difference(std::max(x, lower_bound_), lower_bound_) - 1.0;
    return (alpha_ * b() - 1.0) / (offset * slope) + 1.0 / (1.0 - x);
  }
  // With psi = (1-phi)/(1-x) and chi = (b-psi)/(1-x):
  // omega = alpha chi / (1 - alpha psi).
  return alpha_ * offspring_.tail_ratio_slope(x) / (1.0 - alpha_ * offspring_.tail_ratio(x));
}

double FixedPointSolver::integrate_omega(double from, double to) const {
  // Integration runs over the offset d = x - lower_bound, exact near the pole.
  auto f = [this](double d) { return omega_at(lower_bound_ + d, d); };
  const QuadratureOptions opts{config_.quad_tol, 0.0, 4000};
  const double edge = 1.0 - config_.singular_window - lower_bound_;
  if (from < edge && to > edge) {
    const double pts[] = {from, edge, to};
    return integrate_panels(f, pts, opts).value;
  }
  return integrate(f, from, to, opts).value;
}

double FixedPointSolver::log_omega_cap(double x) const {
  if (!(x > lower_bound_ && x <= 1.0)) {
    std::ostringstream msg;
    msg << "Omega: x = " << x << " outside (" << lower_bound_ << ", 1]";
    throw DomainError(msg.str());
  }
  if (x == 1.0) return 0.0;
  const double d = x - lower_bound_;
  // First tabulated offset <= d (offsets are descending).
  const auto it = std::lower_bound(offsets_.begin(), offsets_.end(), d, std::greater<>());
  const auto j = static_cast<std::size_t>(it - offsets_.begin());
  if (j < offsets_.size() && offsets_[j] == d) return log_omega_[j];
  if (j == 0) return -integrate_omega(d, offsets_[0]);
  const std::size_t base = j - 1;
  return log_omega_[base] - integrate_omega(d, offsets_[base]);
}

double FixedPointSolver::omega_cap(double x) const { return std::exp(log_omega_cap(x)); }

double FixedPointSolver::implicit_residual(double t, double u) const {
  return std::abs(b() * (1.0 - u) * omega_cap(u) - t);
}

double FixedPointSolver::ode_residual(double t, double h) const {
  if (!(h > 0.0) || !(t > h)) throw DomainError("ode_residual: need 0 < h < t");
  const double derivative = (solve_u(t + h) - solve_u(t - h)) / (2.0 * h);
  const double u = solve_u(t);
  const double rhs = (alpha_ * offspring_.pgf(u) - u + 1.0 - alpha_) / t;
  return std::abs((alpha_ * b() - 1.0) * derivative - rhs);
}

double FixedPointSolver::solve_u(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    std::ostringstream msg;
    msg << "solve_u: t = " << t << " must be finite and >= 0";
    throw DomainError(msg.str());
  }
  if (t == 0.0) return 1.0;

  const double log_t = std::log(t);
  const double log_b = std::log(b());
  auto excess = [&](double x) { return log_b + std::log1p(-x) + log_omega_cap(x) - log_t; };

  double lo = lower_bound_ + offsets_.back();
  double hi = 1.0;
  double f_lo = excess(lo);
  double f_hi = -std::numeric_limits<double>::infinity();
  if (!(f_lo > 0.0)) {
    std::ostringstream msg;
    msg << "solve_u: t = " << t << " beyond the representable range (u within "
        << lo - lower_bound_ << " of its limit)";
    throw RangeError(msg.str());
  }
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = excess(mid);
    if (f_mid == 0.0) {
      lo = hi = mid;
      f_lo = f_hi = 0.0;
      break;
    }
    if (f_mid > 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  const double u = std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;

  // The residual is limited by the spacing of doubles around u.
  const double slope = std::abs(omega(u) - 1.0 / (1.0 - u));
  const double spacing = std::nextafter(u, 2.0) - u;
  const double allowed =
      10.0 * config_.root_tol * std::max(1.0, t) + 2.0 * t * slope * spacing;
  const double residual = implicit_residual(t, u);
  if (!(residual <= allowed)) {
    std::ostringstream msg;
    msg << "solve_u: residual " << residual << " exceeds " << allowed << " at t = " << t;
    throw ConvergenceError(msg.str());
  }
  return u;
}

double FixedPointSolver::laplace_residual(const std::function<double(double)>& g,
                                          double t) const {
  if (!(t >= 0.0)) throw DomainError("laplace_residual: t must be >= 0");
  // x = b v^(1/(1-gamma)) turns the continuous part of mu into alpha dv.
  const double shape = alpha_ * b() - 1.0;
  auto integrand = [&](double v) { return g(t * std::pow(v, shape)); };
  const double mean_g =
      integrate(integrand, 0.0, 1.0, {config_.quad_tol, 0.0, 4000}).value;
  const double arg = std::clamp(1.0 - alpha_ + alpha_ * mean_g, 0.0, 1.0);
  return std::abs(g(t) - offspring_.pgf(arg));
}

double FixedPointSolver::laplace_residual(double t) const {
  return laplace_residual([this](double s) { return g(s); }, t);
}

std::vector<SolveRow> tabulate(const FixedPointSolver& solver, std::span<const double> t_grid,
                               bool with_laplace_residual) {
  std::vector<SolveRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    const double u = solver.solve_u(t);
    rows.push_back({t, u, solver.offspring().pgf(u), solver.implicit_residual(t, u),
                    with_laplace_residual ? solver.laplace_residual(t) : 0.0});
  }
  return rows;
}

double omega_eval(const OffspringLaw& offspring, double alpha, double x) {
  return FixedPointSolver(offspring, alpha).omega(x);
}

double omega_cap(const OffspringLaw& offspring, double alpha, double x, const SolverConfig& cfg) {
  return FixedPointSolver(offspring, alpha, cfg).omega_cap(x);
}

double solve_u(const OffspringLaw& offspring, double alpha, double t, const SolverConfig& cfg) {
  return FixedPointSolver(offspring, alpha, cfg).solve_u(t);
}

double g_of_t(const OffspringLaw& offspring, double alpha, double t, const SolverConfig& cfg) {
  return FixedPointSolver(offspring, alpha, cfg).g(t);
}

double laplace_residual(const OffspringLaw& offspring, double alpha, double t,
                        const SolverConfig& cfg) {
  return FixedPointSolver(offspring, alpha, cfg).laplace_residual(t);
}

}  // namespace smoothing
