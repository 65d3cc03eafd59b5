#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cvsskit {

/// Fisher-Yates with an explicit mt19937_64 draw. std::shuffle is
/// implementation-defined across standard libraries; splits and training
/// must reproduce bit-identically everywhere, so the draw is spelled out.
void deterministic_shuffle(std::vector<std::size_t>& indices, std::uint64_t seed);

/// Identity permutation 0..n-1.
std::vector<std::size_t> index_range(std::size_t n);

/// Epoch seconds from an ISO-8601 timestamp ("2025-03-01T12:00:00Z",
/// fractional seconds and numeric offsets accepted). nullopt if unparseable.
std::optional<std::int64_t> parse_iso8601(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

/// Collapses runs of whitespace to single spaces and trims the ends.
std::string collapse_whitespace(std::string_view text);

} // namespace cvsskit
