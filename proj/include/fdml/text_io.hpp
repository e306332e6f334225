#pragma once

// Delimiter-separated text helpers. All numeric formatting is locale-independent.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fdml {

std::vector<std::string> split_record(std::string_view line, char delim);
std::string join_record(const std::vector<std::string>& fields, char delim);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  // Index of a header column, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;
};

// Reads a header + rows file. Blank lines are skipped; rows with a field count
// different from the header are kept as-is so callers can report them.
Table read_table(const std::filesystem::path& path, char delim = ',');

// Returns nullopt for empty or malformed input; accepts surrounding blanks.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

// Shortest round-trip representation ("0.1", "-3", "1e-09").
std::string format_double(double value);
// Fixed notation with `digits` decimals.
std::string format_fixed(double value, int digits);

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

void ensure_directory(const std::filesystem::path& dir);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace fdml
