// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smoothing/closed_forms.hpp"
#include "smoothing/grid.hpp"

namespace smoothlab {

enum ExitStatus : int {
  kOk = 0,
  kVerificationFailed = 1,
  kUsage = 2,
  kConstraint = 3,
  kNumeric = 4,
};

/// Fully resolved settings of one invocation.
struct RunConfig {
  std::string subcommand;  // simulate | solve | table | verify | examples
  std::string offspring;
  std::optional<double> alpha;
  std::string method = "pool:M=200000,K=50";
  std::int64_t count = 100'000;
  std::uint64_t seed = 1;
  int workers = 1;
  smoothing::GridSpec grid = smoothing::default_grid();
  std::string format = "csv";  // csv | json (| bin for simulate)
  std::string output;          // empty: stdout
  int example_id = 0;          // 0: all (examples); required for table
  smoothing::ExampleParams params;
  bool params_given = false;

  /// Key-value form accepted by config_from_map; round-trips exactly.
  std::map<std::string, std::string> to_map() const;
};

/// Keys: subcommand, offspring, alpha, method, count, seed, workers,
/// t-grid, format, output, id, n, rho, p, example-alpha. Unknown keys
/// are a ParseError.
RunConfig config_from_map(const std::map<std::string, std::string>& values);

/// Plain-text config: one `key = value` per line, `#` starts a comment.
/// A JSON sidecar written by a previous run is also accepted; its
/// "config" object is used.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Executes the run; progress and derived quantities go to `log`,
/// results to the output file or `out`.
int run(const RunConfig& config, std::ostream& out, std::ostream& log);

/// Parses argv (flags override a --config file) and runs. Every error is
/// mapped to its exit status.
int main_with_args(int argc, const char* const* argv, std::ostream& out, std::ostream& log);

}  // namespace smoothlab
