#include "persist/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "persist/errors.hpp"

namespace persist::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

std::vector<std::vector<std::string>> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::vector<std::vector<std::string>> records;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    records.push_back(split_record(line));
  }
  return records;
}

double parse_real(std::string_view cell, std::size_t row, std::size_t col) {
  const std::string_view text = trim(cell);
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last) {
    std::ostringstream msg;
    msg << "unparseable cell '" << text << "' at row " << row << ", column " << col;
    throw InputError(msg.str());
  }
  return value;
}

std::vector<std::vector<double>> read_numeric(const std::filesystem::path& path, bool skip_header) {
  const auto records = read_records(path);
  std::vector<std::vector<double>> rows;
  for (std::size_t r = skip_header ? 1 : 0; r < records.size(); ++r) {
    std::vector<double> row;
    row.reserve(records[r].size());
    for (std::size_t c = 0; c < records[r].size(); ++c) row.push_back(parse_real(records[r][c], r + 1, c + 1));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError("row " + std::to_string(r + 1) + " of '" + path.string() + "' has " +
                       std::to_string(row.size()) + " columns, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace persist::csv
