// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace smoothing {

/// Evaluation grid in t: `points` values from `min` to `max`, linear or
/// log-spaced. `with_zero` prepends t = 0 (log grids cannot contain it).
struct GridSpec {
  double min = 1e-2;
  double max = 20.0;
  int points = 50;
  bool log = true;
  bool with_zero = true;

  std::vector<double> values() const;
  /// `min:max:points[:log|:linear]`, with a leading `0+` for with_zero.
  std::string describe() const;
};

/// Parses `min:max:points[:log|:linear]`, optionally prefixed by `0+`.
/// Linear grids whose min is 0 already contain 0. Throws ParseError or
/// DomainError.
GridSpec parse_grid(std::string_view text);

/// 0 plus 50 log points in [1e-2, 20].
GridSpec default_grid();

std::vector<double> linear_grid(double min, double max, int points);
std::vector<double> log_grid(double min, double max, int points);

}  // namespace smoothing
