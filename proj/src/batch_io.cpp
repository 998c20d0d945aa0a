// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothing/batch_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "smoothing/errors.hpp"
#include "smoothing/text_util.hpp"

namespace smoothing {

namespace {

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint64_t get_u64(std::string_view bytes, std::size_t offset) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return v;
}

}  // namespace

void write_file_atomically(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string encode_batch_binary(const SampleBatch& batch) {
  std::string out;
  out.reserve(16 + 8 * static_cast<std::size_t>(batch.count()));
  put_u64(out, kBatchMagic);
  put_u64(out, static_cast<std::uint64_t>(batch.count()));
  for (double v : batch.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

SampleBatch decode_batch_binary(std::string_view bytes, std::uint64_t spec_hash,
                                std::uint64_t seed) {
  if (bytes.size() < 16 || get_u64(bytes, 0) != kBatchMagic) {
    throw ParseError("batch: missing binary header");
  }
  const std::uint64_t count = get_u64(bytes, 8);
  if (bytes.size() != 16 + 8 * count) throw ParseError("batch: size does not match header count");
  std::vector<double> values(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<double>(get_u64(bytes, 16 + 8 * i));
  }
  return SampleBatch(std::move(values), spec_hash, seed);
}

std::string encode_batch_csv(const SampleBatch& batch) {
  std::string out = "y\n";
  char buf[40];
  for (double v : batch.values()) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out += buf;
  }
  return out;
}

SampleBatch decode_batch_csv(std::string_view text, std::uint64_t spec_hash, std::uint64_t seed) {
  std::vector<double> values;
  bool header = true;
  for (const auto& line : split(text, '\n')) {
    if (line.empty()) continue;
    if (header) {
      if (line != "y") throw ParseError("batch: CSV header must be 'y'");
      header = false;
      continue;
    }
    values.push_back(parse_double(line, "batch value"));
  }
  if (header) throw ParseError("batch: empty CSV");
  return SampleBatch(std::move(values), spec_hash, seed);
}

std::filesystem::path sidecar_path(const std::filesystem::path& output) {
  auto p = output;
  p += ".meta.json";
  return p;
}

std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t parse_hash_hex(std::string_view text) {
  std::uint64_t v = 0;
  if (text.size() != 16) throw ParseError("bad hash '" + std::string(text) + "'");
  for (char c : text) {
    v <<= 4;
    if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
    else throw ParseError("bad hash '" + std::string(text) + "'");
  }
  return v;
}

SampleBatch load_batch(const std::filesystem::path& path) {
  const auto meta = nlohmann::json::parse(read_file(sidecar_path(path)));
  const auto hash = parse_hash_hex(meta.at("spec_hash").get<std::string>());
  const auto seed = meta.at("seed").get<std::uint64_t>();
  const auto format = meta.at("format").get<std::string>();
  const auto content = read_file(path);
  if (format == "binary") return decode_batch_binary(content, hash, seed);
  if (format == "csv") return decode_batch_csv(content, hash, seed);
  throw ParseError("batch: unknown format '" + format + "' in sidecar");
}

}  // namespace smoothing
