#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace cruciverba {

using Clock = std::function<std::chrono::system_clock::time_point()>;

Clock system_clock();
// Always returns `at`. Replay mode and tests use this for byte-stable output.
Clock fixed_clock(std::chrono::system_clock::time_point at);

// ISO-8601 UTC with second precision, e.g. "2024-12-04T10:00:00Z".
std::string format_utc(std::chrono::system_clock::time_point t);
std::chrono::system_clock::time_point parse_utc(std::string_view iso);

std::string sha256_hex(std::string_view data);
uint64_t sha256_prefix64(std::string_view data);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace cruciverba
