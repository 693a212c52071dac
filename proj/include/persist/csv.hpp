#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace persist::csv {

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_record(std::string_view line);

// Reads all non-empty records of a file. Throws InputError when unreadable.
std::vector<std::vector<std::string>> read_records(const std::filesystem::path& path);

// Parses a real number occupying the whole (trimmed) cell. `row` and `col` are
// 1-based and only used for the error message.
double parse_real(std::string_view cell, std::size_t row, std::size_t col);

// Reads a headerless (or header-skipped) numeric table with equal-width rows.
std::vector<std::vector<double>> read_numeric(const std::filesystem::path& path, bool skip_header);

// Shortest decimal text that parses back to exactly `value`.
std::string format_real(double value);

void write_text(const std::filesystem::path& path, std::string_view content);

}  // namespace persist::csv
