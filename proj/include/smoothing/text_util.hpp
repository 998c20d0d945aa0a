// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace smoothing {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Full-string numeric parses; throw ParseError naming `what` on failure.
double parse_double(std::string_view s, std::string_view what);
int parse_int(std::string_view s, std::string_view what);
long long parse_int64(std::string_view s, std::string_view what);

/// "a=1,b=2" -> {a: "1", b: "2"}; keys are lower-cased and trimmed.
std::map<std::string, std::string> parse_key_values(std::string_view s, char sep);

/// Shortest decimal that round-trips to the same double.
std::string format_exact(double v);

}  // namespace smoothing
