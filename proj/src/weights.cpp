// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothing/weights.hpp"

#include <cmath>
#include <sstream>

#include "smoothing/errors.hpp"
#include "smoothing/quadrature.hpp"
#include "smoothing/text_util.hpp"

namespace smoothing {

WeightLaw weight_law_from(double alpha, double b) {
  if (!(b > 1.0) || !std::isfinite(b)) {
    std::ostringstream msg;
    msg << "weights: b = " << b << " must satisfy b > 1";
    throw ValidationError(msg.str());
  }
  if (!(alpha * b > 1.0) || !(alpha <= 1.0)) {
    std::ostringstream msg;
    msg << "weights: alpha = " << alpha << " violates 1/b < alpha <= 1 (b = " << b
        << ", alpha*b = " << alpha * b << ")";
    throw ValidationError(msg.str());
  }
  const double gamma = 1.0 - 1.0 / (alpha * b - 1.0);
  return WeightLaw(alpha, b, gamma);
}

double power_law_moment(double alpha, double b, int k) {
  if (k < 1) throw DomainError("weights: moment order must be >= 1");
  const double one_minus_gamma = 1.0 / (alpha * b - 1.0);
  const double gamma = 1.0 - one_minus_gamma;
  return alpha * one_minus_gamma * std::pow(b, k) / (k + 1.0 - gamma);
}

double WeightLaw::moment(int k) const { return power_law_moment(alpha_, b_, k); }

double WeightLaw::conditional_quantile(double u) const { return b_ * std::pow(u, shape()); }

double WeightLaw::conditional_cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= b_) return 1.0;
  return std::pow(x / b_, 1.0 - gamma_);
}

double WeightLaw::w_log_w() const {
  // x = b v^(1/(1-gamma)) maps the nonzero part of mu to alpha dv on (0,1).
  const double k = shape();
  const double b = b_;
  auto integrand = [k, b](double v) {
    const double x = b * std::pow(v, k);
    return x > 0.0 ? x * std::log(x) : 0.0;
  };
  return alpha_ * integrate(integrand, 0.0, 1.0, {1e-14, 1e-13, 4000}).value;
}

std::string WeightLaw::describe() const { return "weights:alpha=" + format_exact(alpha_); }

double parse_weights_alpha(std::string_view text) {
  std::string_view body = text;
  if (const auto colon = text.find(':'); colon != std::string_view::npos) {
    if (to_lower(trim(text.substr(0, colon))) != "weights") {
      throw ParseError("weights: expected 'weights:alpha=<a>', got '" + std::string(text) + "'");
    }
    body = text.substr(colon + 1);
  }
  auto kv = parse_key_values(body, ',');
  if (kv.size() != 1 || !kv.count("alpha")) {
    throw ParseError("weights: expected exactly one parameter 'alpha' in '" + std::string(text) + "'");
  }
  return parse_double(kv["alpha"], "alpha");
}

}  // namespace smoothing
