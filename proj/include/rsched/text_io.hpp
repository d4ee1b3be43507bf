#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rsched {

// Shortest representation that parses back to the same double.
std::string format_roundtrip(double value);
std::string format_fixed(double value, int decimals);
double parse_double(std::string_view text);  // throws std::invalid_argument
long long parse_int(std::string_view text);

std::vector<std::string_view> split_csv_line(std::string_view line);
std::string_view trim(std::string_view text);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Verbosity from RECONFIG_SCHED_LOG (error|warn|info|debug, default warn).
enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };
LogLevel log_level();
void log(LogLevel level, std::string_view message);

}  // namespace rsched
