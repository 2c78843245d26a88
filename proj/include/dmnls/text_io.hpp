#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace dmnls {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Strict parse of a complete token as a double; throws std::invalid_argument.
double parse_double(std::string_view s);

/// Writes `contents` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

std::string_view trim(std::string_view s);

}  // namespace dmnls
