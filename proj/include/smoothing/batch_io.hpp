// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "smoothing/cascade.hpp"

namespace smoothing {

/// "SMTHBAT1" read as a little-endian 64-bit integer.
inline constexpr std::uint64_t kBatchMagic = 0x3154414248544d53ULL;

/// Writes `content` to a temporary sibling file and renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

/// Binary layout: u64 magic, u64 count, then count f64 values; all
/// little-endian.
std::string encode_batch_binary(const SampleBatch& batch);
/// CSV: header row `y`, one value per row in round-trip precision.
std::string encode_batch_csv(const SampleBatch& batch);

/// Decoders; provenance comes from the sidecar.
SampleBatch decode_batch_binary(std::string_view bytes, std::uint64_t spec_hash,
                                std::uint64_t seed);
SampleBatch decode_batch_csv(std::string_view text, std::uint64_t spec_hash, std::uint64_t seed);

/// Path of the JSON metadata record accompanying a batch or table file.
std::filesystem::path sidecar_path(const std::filesystem::path& output);

/// Hexadecimal rendering used for spec hashes in sidecars.
std::string hash_hex(std::uint64_t h);
std::uint64_t parse_hash_hex(std::string_view text);

/// Reads `path` and its sidecar (fields spec_hash, seed) back into a batch.
/// The format is chosen by the sidecar's "format" field (binary | csv).
SampleBatch load_batch(const std::filesystem::path& path);

}  // namespace smoothing
