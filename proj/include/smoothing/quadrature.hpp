// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <initializer_list>
#include <span>

namespace smoothing {

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 0.0;
  int max_intervals = 2000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int evaluations = 0;
  int intervals = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 15-point Gauss-Kronrod quadrature on a finite interval
/// [a, b] (a > b allowed; the sign follows). The integrand is never evaluated
/// at the endpoints, so integrable endpoint singularities are tolerated.
///
/// Throws QuadratureError when the requested tolerance
/// max(abs_tol, rel_tol*|I|) is not met within max_intervals panels.
QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& opts = {});

/// Same as integrate() over consecutive panels [p0,p1], [p1,p2], ...; the
/// tolerance is shared equally among panels.
QuadratureResult integrate_panels(const Integrand& f, std::span<const double> breakpoints,
                                  const QuadratureOptions& opts = {});

/// Integral over [a, +inf) of a function decaying at least exponentially:
/// panels of geometrically growing width until a panel contributes less than
/// the tolerance.
QuadratureResult integrate_to_infinity(const Integrand& f, double a, double first_width,
                                       const QuadratureOptions& opts = {});

/// Single 15-point Kronrod panel with the embedded 7-point Gauss error.
QuadratureResult gauss_kronrod_15(const Integrand& f, double a, double b);

}  // namespace smoothing
