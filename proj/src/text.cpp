#include "persist/text.hpp"

#include <charconv>
#include <cmath>

#include "persist/csv.hpp"
#include "persist/errors.hpp"

namespace persist::text {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

namespace {

[[noreturn]] void bad(std::string_view s, std::string_view what) {
  throw InputError(std::string(what) + ": cannot parse '" + std::string(s) + "'");
}

double parse_plain(std::string_view s, std::string_view what) {
  const std::string t = trim(s);
  double v = 0.0;
  const char* first = t.data();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) bad(s, what);
  return v;
}

}  // namespace

double parse_number(std::string_view s, std::string_view what) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_plain(s, what);
  const double num = parse_plain(s.substr(0, slash), what);
  const double den = parse_plain(s.substr(slash + 1), what);
  if (den == 0.0) bad(s, what);
  return num / den;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> parse_numbers(std::string_view list, std::string_view what) {
  std::vector<double> out;
  for (const auto& item : split(list, ',')) out.push_back(parse_number(item, what));
  return out;
}

std::uint64_t parse_size(std::string_view s, std::string_view what) {
  const std::string t = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) bad(s, what);
  return v;
}

bool parse_bool(std::string_view s, std::string_view what) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  bad(s, what);
}

std::string format_number(double v) { return csv::format_real(v); }

std::string csv_quote(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace persist::text
