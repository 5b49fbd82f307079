#pragma once

#include <concepts>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sitcog::csv {

// Locale-independent, round-trip exact (17 significant digits).
std::string format(double value);
std::string format(bool value);

template <std::integral T>
std::string format(T value) {
  return std::to_string(value);
}

std::vector<std::string_view> split(std::string_view line, char sep = ',');

double parse_double(std::string_view text);
long long parse_int(std::string_view text);

// Writes to a sibling temporary file, then renames over the target.
void write_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// Splits file contents into lines (LF; a trailing CR is dropped).
std::vector<std::string_view> lines(std::string_view contents);

}  // namespace sitcog::csv
