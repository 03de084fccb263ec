#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tpat {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

/// Writes `contents` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

/// Splits on whitespace.
std::vector<std::string> split_ws(std::string_view line);

}  // namespace tpat
