// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothing/grid.hpp"

#include <cmath>

#include "smoothing/errors.hpp"
#include "smoothing/text_util.hpp"

namespace smoothing {

std::vector<double> linear_grid(double min, double max, int points) {
  if (points < 1) throw DomainError("grid: need at least one point");
  if (points == 1) return {min};
  std::vector<double> out(static_cast<std::size_t>(points));
  const double step = (max - min) / (points - 1);
  for (int i = 0; i < points; ++i) out[i] = min + step * i;
  out.back() = max;
  return out;
}

std::vector<double> log_grid(double min, double max, int points) {
  if (!(min > 0.0)) throw DomainError("log grid: min must be > 0");
  auto out = linear_grid(std::log(min), std::log(max), points);
  for (double& v : out) v = std::exp(v);
  out.front() = min;
  out.back() = max;
  return out;
}

std::vector<double> GridSpec::values() const {
  std::vector<double> out;
  if (with_zero) out.push_back(0.0);
  const auto body = log ? log_grid(min, max, points) : linear_grid(min, max, points);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

std::string GridSpec::describe() const {
  return std::string(with_zero ? "0+" : "") + format_exact(min) + ":" + format_exact(max) + ":" +
         std::to_string(points) + (log ? ":log" : ":linear");
}

GridSpec parse_grid(std::string_view text) {
  GridSpec spec;
  std::string body = trim(text);
  spec.with_zero = false;
  if (body.starts_with("0+")) {
    spec.with_zero = true;
    body = body.substr(2);
  }
  const auto parts = split(body, ':');
  if (parts.size() != 3 && parts.size() != 4) {
    throw ParseError("t-grid '" + std::string(text) + "': expected min:max:points[:log|:linear]");
  }
  spec.min = parse_double(parts[0], "t-grid min");
  spec.max = parse_double(parts[1], "t-grid max");
  spec.points = parse_int(parts[2], "t-grid points");
  spec.log = false;
  if (parts.size() == 4) {
    const auto kind = to_lower(trim(parts[3]));
    if (kind == "log") {
      spec.log = true;
    } else if (kind != "linear" && kind != "lin") {
      throw ParseError("t-grid spacing must be log or linear, got '" + kind + "'");
    }
  }
  if (!(spec.min >= 0.0) || !(spec.max > spec.min) || spec.points < 2) {
    throw DomainError("t-grid: need 0 <= min < max and points >= 2");
  }
  if (spec.log && spec.min == 0.0) throw DomainError("t-grid: log spacing needs min > 0");
  return spec;
}

GridSpec default_grid() { return {}; }

}  // namespace smoothing
