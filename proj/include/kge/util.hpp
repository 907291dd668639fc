#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace kge {

std::vector<std::string_view> split_tabs(std::string_view line);
std::string_view trim(std::string_view s);
bool valid_utf8(std::string_view s);

// Shortest decimal text that parses back to the identical double.
std::string format_double(double v);
double parse_double(std::string_view s);
std::uint64_t parse_uint(std::string_view s);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace kge
