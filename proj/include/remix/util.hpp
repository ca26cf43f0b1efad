#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace remix {

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws Error(PARSE_ERROR) on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// 64-bit FNV-1a. Stable across platforms, used wherever a hash must be
/// reproducible (mock embeddings, prompt fingerprints).
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string_view trim(std::string_view s);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace remix
