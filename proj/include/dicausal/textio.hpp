#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dicausal::textio {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

// Splits one line on commas; surrounding spaces are trimmed per field.
std::vector<std::string_view> split_csv(std::string_view line);

std::string read_file(const std::filesystem::path& path);
// Truncates and writes; throws Error on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace dicausal::textio
