#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace poolforge {

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

// Fixed-precision text for CSV columns.
std::string format_fixed(double value, int precision);

std::string read_file(const std::filesystem::path &path);

// Writes to a sibling temp file, then renames over the target.
void atomic_write_file(const std::filesystem::path &path,
                       std::string_view content);

}  // namespace poolforge
