// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothing/text_util.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>

#include "smoothing/errors.hpp"

namespace smoothing {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(std::string_view s, std::string_view what) {
  const std::string text = trim(s);
  if (!text.empty()) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() + text.size()) return v;
  }
  throw ParseError("cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
}

long long parse_int64(std::string_view s, std::string_view what) {
  const std::string text = trim(s);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    // Accept integral scientific notation such as 2e5.
    try {
      const double d = parse_double(text, what);
      if (d == static_cast<double>(static_cast<long long>(d))) return static_cast<long long>(d);
    } catch (const ParseError&) {
    }
    throw ParseError("cannot parse integer " + std::string(what) + " from '" + std::string(s) + "'");
  }
  return v;
}

int parse_int(std::string_view s, std::string_view what) {
  const long long v = parse_int64(s, what);
  if (v < -2147483647LL || v > 2147483647LL) {
    throw ParseError("integer " + std::string(what) + " out of range: '" + std::string(s) + "'");
  }
  return static_cast<int>(v);
}

std::map<std::string, std::string> parse_key_values(std::string_view s, char sep) {
  std::map<std::string, std::string> out;
  if (trim(s).empty()) return out;
  for (const auto& item : split(s, sep)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected key=value, got '" + item + "'");
    }
    out[to_lower(trim(std::string_view(item).substr(0, eq)))] =
        trim(std::string_view(item).substr(eq + 1));
  }
  return out;
}

std::string format_exact(double v) {
  char buf[32];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace smoothing
