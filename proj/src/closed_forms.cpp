// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothing/closed_forms.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "smoothing/errors.hpp"
#include "smoothing/fixed_point.hpp"
#include "smoothing/grid.hpp"
#include "smoothing/quadrature.hpp"
#include "smoothing/text_util.hpp"
#include "smoothing/weights.hpp"

namespace smoothing {

namespace {

using std::numbers::pi;

constexpr double kDensityTol = 1e-13;

[[noreturn]] void violated(int id, const std::string& inequality, const std::string& values) {
  throw ValidationError("example " + std::to_string(id) + ": constraint " + inequality +
                        " violated (" + values + ")");
}

std::string kv(const char* name, double v) { return std::string(name) + "=" + format_exact(v); }

double gamma_density(double shape, double rate, double s) {
  return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(s) - rate * s -
                  std::lgamma(shape));
}

}  // namespace

ExampleParams default_example_params(int id) {
  ExampleParams p;
  switch (id) {
    case 1: p.n = 1; break;
    case 2: p.rho = 0.9; p.alpha = 1.0; break;
    case 3: p.rho = 0.5; p.n = 2; break;
    case 4: p.p = 0.75; break;
    case 5: p.p = 0.75; break;
    case 6: p.p = 0.8; break;
    default: throw DomainError("example id must be in 1..6");
  }
  return p;
}

double example2_rate(double rho, double alpha) { return 4.0 * rho - 2.0 / alpha; }

double example6_alpha(double p) { return -2.0 * p * (1.0 - p) / (2.0 * p * p - 4.0 * p + 1.0); }

AnalyticSolution::AnalyticSolution(int id, ExampleParams params, OffspringLaw offspring,
                                   double alpha, double atom)
    : id_(id), params_(params), offspring_(std::move(offspring)), alpha_(alpha), atom_(atom) {
  if (id_ == 1 || id_ == 3) substitution_power_ = std::max(2, params_.n);
}

AnalyticSolution make_example(int id, const ExampleParams& params) {
  switch (id) {
    case 1: {
      if (params.n < 1) violated(1, "n >= 1", kv("n", params.n));
      return AnalyticSolution(1, params, OffspringLaw(offspring::Deterministic{params.n}), 1.0,
                              0.0);
    }
    case 2: {
      const double rho = params.rho;
      const double a = params.alpha;
      if (!(rho > 0.0 && rho <= 1.0)) violated(2, "0 < rho <= 1", kv("rho", rho));
      if (!(a <= 1.0)) violated(2, "alpha <= 1", kv("alpha", a));
      if (!(2.0 * a * rho > 1.0)) {
        violated(2, "alpha > 1/(2 rho)", kv("alpha", a) + ", " + kv("rho", rho));
      }
      if (!(example2_rate(rho, a) > 0.0)) {
        violated(2, "4 rho - 2/alpha > 0", kv("alpha", a) + ", " + kv("rho", rho));
      }
      const double atom = (a * a * rho - 2.0 * a * rho + 1.0) / (rho * a * a);
      AnalyticSolution sol(2, params, OffspringLaw(offspring::Binary{rho}), a, atom);
      // Self-test: the density's transform must reproduce g.
      for (double t : {0.5, 2.0}) {
        const double diff = std::abs(sol.density_laplace(t) - sol.g(t));
        if (diff > 1e-9) {
          std::ostringstream msg;
          msg << "example 2: density self-test failed at t = " << t << " (|diff| = " << diff
              << ")";
          throw Error(msg.str());
        }
      }
      return sol;
    }
    case 3: {
      const double rho = params.rho;
      if (!(rho > 0.0 && rho <= 1.0)) violated(3, "0 < rho <= 1", kv("rho", rho));
      if (params.n < 1) violated(3, "n >= 1", kv("n", params.n));
      return AnalyticSolution(3, params, OffspringLaw(offspring::Delayed{rho, params.n}), 1.0,
                              0.0);
    }
    case 4: {
      const double p = params.p;
      if (!(p > 0.5 && p < 1.0)) violated(4, "1/2 < p < 1", kv("p", p));
      return AnalyticSolution(4, params, OffspringLaw(offspring::Geometric{p}),
                              2.0 * (1.0 - p) / p, 0.5);
    }
    case 5: {
      const double p = params.p;
      if (!(p >= 0.5 && p < 1.0)) {
        violated(5, "1/2 <= p < 1 (alpha = 2(1-p) <= 1)", kv("p", p));
      }
      return AnalyticSolution(5, params, OffspringLaw(offspring::ShiftedGeometric{p}),
                              2.0 * (1.0 - p), (2.0 * p - 1.0) / (2.0 * p));
    }
    case 6: {
      const double p = params.p;
      if (!(p > 0.5 && p < 1.0)) violated(6, "1/2 < p < 1", kv("p", p));
      const double a = example6_alpha(p);
      const double b = 2.0 + p / (1.0 - p);
      if (!(a * b > 1.0 && a <= 1.0)) {
        violated(6, "1 - 1/(2-p) < alpha <= 1", kv("p", p) + ", " + kv("alpha", a));
      }
      return AnalyticSolution(6, params, OffspringLaw(offspring::SquareGeometric{p}), a,
                              (2.0 * p - 1.0) * (2.0 * p - 1.0) / (2.0 * p * p));
    }
    default:
      throw DomainError("example id must be in 1..6, got " + std::to_string(id));
  }
}

double AnalyticSolution::u(double t) const {
  if (!(t >= 0.0)) throw DomainError("u: t must be >= 0");
  const int n = params_.n;
  const double rho = params_.rho;
  const double p = params_.p;
  const double a = alpha_;
  switch (id_) {
    case 1: return std::pow(1.0 + n * t / (n + 1.0), -1.0 / n);
    case 2: {
      const double ar = a * rho;
      const double c = 2.0 * ar - 1.0;
      return (1.0 - ar) / ar + 2.0 * c * c / (ar * (4.0 * ar + a * t - 2.0));
    }
    case 3: return std::pow(1.0 + n * t / (rho * n + 1.0), -1.0 / n);
    case 4: return (2.0 * p - 1.0) / p + 2.0 * (1.0 - p) / (p * (std::sqrt(4.0 * t + 1.0) + 1.0));
    case 5:
      return (2.0 * p - 1.0) / p +
             2.0 * (1.0 - p) / (p * (std::sqrt(4.0 * p * t + 1.0) + 1.0));
    case 6: {
      const double root = std::sqrt(4.0 * p * t / (2.0 - p) + 1.0);
      return (2.0 * p - 1.0) / p + 2.0 * (1.0 - p) / (p * (1.0 + root));
    }
  }
  return 0.0;
}

double AnalyticSolution::g(double t) const {
  if (!(t >= 0.0)) throw DomainError("g: t must be >= 0");
  const int n = params_.n;
  const double rho = params_.rho;
  const double p = params_.p;
  const double a = alpha_;
  switch (id_) {
    case 1: return std::pow(1.0 + n * t / (n + 1.0), -(n + 1.0) / n);
    case 2: {
      const double c = 2.0 * a * rho - 1.0;
      const double d = 4.0 * a * rho + a * t - 2.0;
      const double ra2 = rho * a * a;
      return (a * a * rho - 2.0 * a * rho + 1.0) / ra2 + 4.0 * (1.0 - a * rho) * c * c / (ra2 * d) +
             4.0 * std::pow(c, 4) / (ra2 * d * d);
    }
    case 3: {
      const double base = 1.0 + n * t / (rho * n + 1.0);
      return (1.0 - rho) * std::pow(base, -1.0 / n) + rho * std::pow(base, -(n + 1.0) / n);
    }
    case 4: return 0.5 + 0.5 / std::sqrt(4.0 * t + 1.0);
    case 5: return (2.0 * p - 1.0) / (2.0 * p) + 1.0 / (2.0 * p * std::sqrt(4.0 * p * t + 1.0));
    case 6: {
      const double root = std::sqrt(4.0 * p * t / (2.0 - p) + 1.0);
      return (2.0 * p - 1.0) * (2.0 * p - 1.0) / (2.0 * p * p) + 1.0 / (2.0 * p * p * root) -
             2.0 * (1.0 - p) * (1.0 - p) / (p * p * (1.0 + root));
    }
  }
  return 0.0;
}

double AnalyticSolution::printed_example6_density(double s) const {
  const double p = params_.p;
  const double q = 2.0 - p;
  return (2.0 * p - 1.0) * (3.0 - 2.0 * p) / (2.0 * p * p) * std::sqrt(q / (pi * s)) *
             std::exp(-q * s) +
         2.0 * q * (1.0 - p) * (1.0 - p) / (p * p) * std::erfc(std::sqrt(q * s));
}

double AnalyticSolution::density(double s) const {
  if (!(s > 0.0)) {
    std::ostringstream msg;
    msg << "density: s = " << s << " must be > 0";
    throw DomainError(msg.str());
  }
  const int n = params_.n;
  const double rho = params_.rho;
  const double p = params_.p;
  const double a = alpha_;
  switch (id_) {
    case 1: {
      const double k = (n + 1.0) / n;
      return gamma_density(k, k, s);
    }
    case 2: {
      const double c = 2.0 * a * rho - 1.0;
      return 4.0 * c * c * (c * c * s + a * (1.0 - a * rho)) / (rho * std::pow(a, 4)) *
             std::exp(-example2_rate(rho, a) * s);
    }
    case 3: {
      const double rate = (rho * n + 1.0) / n;
      return (1.0 - rho) * gamma_density(1.0 / n, rate, s) +
             rho * gamma_density((n + 1.0) / n, rate, s);
    }
    case 4: return std::exp(-s / 4.0) / (4.0 * std::sqrt(pi * s));
    case 5: return std::exp(-s / (4.0 * p)) / (4.0 * std::pow(p, 1.5) * std::sqrt(pi * s));
    case 6: return printed_example6_density(s / (4.0 * p)) / (4.0 * p);
  }
  return 0.0;
}

double AnalyticSolution::integrate_density(const std::function<double(double)>& weight,
                                           double from, double to) const {
  const int m = substitution_power_;
  const double inv_m = 1.0 / m;
  auto f = [&](double v) {
    const double s = std::pow(v, m);
    if (!(s > 0.0)) return 0.0;
    const double w = weight(s);
    if (w == 0.0) return 0.0;
    return w * density(s) * m * std::pow(v, m - 1);
  };
  const QuadratureOptions opts{kDensityTol, 0.0, 4000};
  const double v0 = std::pow(from, inv_m);
  if (std::isinf(to)) return integrate_to_infinity(f, v0, 1.0, opts).value;
  const double v1 = std::pow(to, inv_m);
  // Geometric panels keep long ranges well resolved.
  std::vector<double> cuts{v0};
  double edge = std::max(v0, 0.0) + 1.0;
  while (edge < v1) {
    cuts.push_back(edge);
    edge = 2.0 * edge + 1.0;
  }
  cuts.push_back(v1);
  return integrate_panels(f, cuts, opts).value;
}

double AnalyticSolution::cdf(double s) const {
  if (!(s >= 0.0)) throw DomainError("cdf: s must be >= 0");
  if (s == 0.0) return atom_;
  return atom_ + integrate_density([](double) { return 1.0; }, 0.0, s);
}

std::vector<double> AnalyticSolution::cdf_sorted(std::span<const double> ascending) const {
  std::vector<double> out;
  out.reserve(ascending.size());
  const int m = substitution_power_;
  auto f = [&](double v) {
    const double s = std::pow(v, m);
    return s > 0.0 ? density(s) * m * std::pow(v, m - 1) : 0.0;
  };
  const QuadratureOptions opts{1e-15, 0.0, 4000};
  double mass = 0.0;
  double previous_v = 0.0;
  for (double s : ascending) {
    if (!(s >= 0.0)) throw DomainError("cdf_sorted: values must be >= 0");
    const double v = std::pow(s, 1.0 / m);
    if (v < previous_v) throw DomainError("cdf_sorted: input must be ascending");
    if (v > previous_v) mass += integrate(f, previous_v, v, opts).value;
    previous_v = v;
    out.push_back(s == 0.0 ? atom_ : atom_ + mass);
  }
  return out;
}

double AnalyticSolution::density_moment(int k) const {
  return integrate_density([k](double s) { return std::pow(s, k); }, 0.0,
                           std::numeric_limits<double>::infinity());
}

double AnalyticSolution::density_laplace(double t) const {
  return atom_ + integrate_density([t](double s) { return std::exp(-t * s); }, 0.0,
                                   std::numeric_limits<double>::infinity());
}

double AnalyticSolution::second_moment_formula() const {
  const double bb = b();
  return offspring_.factorial_moment2() / (bb * (bb - power_law_moment(alpha_, bb, 2)));
}

double AnalyticSolution::second_moment() const {
  const double formula = second_moment_formula();
  const double from_density = density_moment(2);
  if (std::abs(formula - from_density) > 1e-8 * std::max(1.0, std::abs(formula))) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "example " << id_ << ": second moment mismatch, formula " << formula
        << " vs density " << from_density;
    throw Error(msg.str());
  }
  return formula;
}

std::string AnalyticSolution::describe() const {
  std::ostringstream out;
  out << "Example " << id_ << " (";
  switch (id_) {
    case 1: {
      const double k = (params_.n + 1.0) / params_.n;
      out << "n=" << params_.n << "): Y ~ Gamma(" << format_exact(k) << ", " << format_exact(k)
          << ")";
      break;
    }
    case 2:
      out << "rho=" << format_exact(params_.rho) << ", alpha=" << format_exact(alpha_)
          << "): atom " << format_exact(atom_) << " + (a s + c) exp(-"
          << format_exact(example2_rate(params_.rho, alpha_)) << " s)";
      break;
    case 3: {
      const double rate = (params_.rho * params_.n + 1.0) / params_.n;
      out << "rho=" << format_exact(params_.rho) << ", n=" << params_.n << "): Y ~ "
          << format_exact(1.0 - params_.rho) << " Gamma(" << format_exact(1.0 / params_.n)
          << ", " << format_exact(rate) << ") + " << format_exact(params_.rho) << " Gamma("
          << format_exact((params_.n + 1.0) / params_.n) << ", " << format_exact(rate) << ")";
      break;
    }
    case 4:
      out << "p=" << format_exact(params_.p) << ", alpha=" << format_exact(alpha_)
          << "): Y ~ 1/2 delta_0 + 1/2 Gamma(1/2, 1/4)";
      break;
    case 5:
      out << "p=" << format_exact(params_.p) << ", alpha=" << format_exact(alpha_) << "): Y ~ "
          << format_exact(atom_) << " delta_0 + " << format_exact(1.0 - atom_) << " Gamma(1/2, "
          << format_exact(1.0 / (4.0 * params_.p)) << ")";
      break;
    case 6:
      out << "p=" << format_exact(params_.p) << ", alpha=" << format_exact(alpha_) << "): atom "
          << format_exact(atom_) << " + erfc-type density";
      break;
  }
  return out.str();
}

std::vector<AdmissibilityPoint> scan_example6_admissibility(int points) {
  std::vector<AdmissibilityPoint> out;
  for (int i = 1; i <= points; ++i) {
    const double p = static_cast<double>(i) / (points + 1);
    const double a = example6_alpha(p);
    const double b = 2.0 + p / (1.0 - p);
    out.push_back({p, a, std::isfinite(a) && a * b > 1.0 && a <= 1.0});
  }
  return out;
}

NonInjectivityReport non_injectivity_witness(double p1, double p2) {
  for (double p : {p1, p2}) {
    if (!(p > 0.5 && p < 1.0)) {
      throw DomainError("non_injectivity_witness: p must lie in (1/2, 1), got " + format_exact(p));
    }
  }
  if (p1 == p2) throw DomainError("non_injectivity_witness: p1 and p2 must differ");
  ExampleParams a, b;
  a.p = p1;
  b.p = p2;
  const auto s1 = make_example(4, a);
  const auto s2 = make_example(4, b);
  NonInjectivityReport report;
  report.spec1 = s1.offspring().describe() + " alpha=" + format_exact(s1.alpha());
  report.spec2 = s2.offspring().describe() + " alpha=" + format_exact(s2.alpha());
  report.alpha1 = s1.alpha();
  report.alpha2 = s2.alpha();
  report.t_grid = log_grid(1e-2, 20.0, 20);
  const FixedPointSolver solver1(s1.offspring(), s1.alpha());
  const FixedPointSolver solver2(s2.offspring(), s2.alpha());
  report.analytic_sup = 0.0;
  report.solver_sup = 0.0;
  for (double t : report.t_grid) {
    report.analytic_sup = std::max(report.analytic_sup, std::abs(s1.g(t) - s2.g(t)));
    report.solver_sup = std::max(report.solver_sup, std::abs(solver1.g(t) - solver2.g(t)));
  }
  return report;
}

}  // namespace smoothing
