#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small parsing helpers shared by the config reader and the CLI.
namespace persist::text {

std::string trim(std::string_view s);

// Real number, or a fraction "a/b". `what` names the field in errors.
double parse_number(std::string_view s, std::string_view what);
std::vector<double> parse_numbers(std::string_view list, std::string_view what);
std::uint64_t parse_size(std::string_view s, std::string_view what);
bool parse_bool(std::string_view s, std::string_view what);
std::vector<std::string> split(std::string_view s, char sep);

std::string format_number(double v);
std::string csv_quote(std::string_view s);

}  // namespace persist::text
