// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "smoothing/random_stream.hpp"

namespace smoothing {

/// Weight law
///
///     mu(dx) = (1 - alpha) delta_0(dx)
///            + alpha (1 - gamma) b^(gamma - 1) x^(-gamma) 1_(0,b)(x) dx
///
/// with gamma = 1 - 1/(alpha b - 1), the unique exponent giving E W = 1.
/// Valid for 1/b < alpha <= 1.
class WeightLaw {
 public:
  double alpha() const { return alpha_; }
  double b() const { return b_; }
  double gamma() const { return gamma_; }
  /// 1 / (1 - gamma) = alpha b - 1, the exponent of the conditional sampler.
  double shape() const { return alpha_ * b_ - 1.0; }

  /// E W^k.
  double moment(int k) const;
  /// E[W log W] by quadrature.
  double w_log_w() const;

  /// Inverse of the conditional cdf (x/b)^(1-gamma) of a nonzero weight.
  double conditional_quantile(double u) const;
  double conditional_cdf(double x) const;

  double sample(RandomStream& rng) const {
    const double atom_draw = rng.uniform_open();
    const double value_draw = rng.uniform_open();
    return atom_draw < alpha_ ? conditional_quantile(value_draw) : 0.0;
  }

  /// `weights:alpha=<a>`.
  std::string describe() const;

  friend WeightLaw weight_law_from(double alpha, double b);

 private:
  WeightLaw(double alpha, double b, double gamma) : alpha_(alpha), b_(b), gamma_(gamma) {}
  double alpha_;
  double b_;
  double gamma_;
};

/// Throws ValidationError unless b > 1 and 1/b < alpha <= 1.
WeightLaw weight_law_from(double alpha, double b);

/// E W^k = alpha (1-gamma) b^k / (k + 1 - gamma) for the same family, without
/// the alpha <= 1 restriction (used by analytic continuations).
double power_law_moment(double alpha, double b, int k);

/// Parses `weights:alpha=<a>` (or the bare `alpha=<a>`) and returns alpha.
double parse_weights_alpha(std::string_view text);

}  // namespace smoothing
