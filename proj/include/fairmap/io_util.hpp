#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fairmap {

// Throws IoError.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Splits on '\n', dropping a trailing '\r' from each line. A final newline does
// not produce an extra empty line.
std::vector<std::string_view> split_lines(std::string_view text);

bool is_blank(std::string_view line) noexcept;

// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

}  // namespace fairmap
