#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ats::io {

std::string read_file(const std::filesystem::path& path);
/// Writes via a sibling temp file and rename.
void write_file(const std::filesystem::path& path, std::string_view content);
void append_line(const std::filesystem::path& path, std::string_view line);

/// Non-empty lines of a JSON-lines file.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Shortest round-trip decimal form, '.' separator regardless of locale.
std::string format_double(double value);
/// Fixed notation with `digits` decimals.
std::string format_fixed(double value, int digits);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace ats::io
