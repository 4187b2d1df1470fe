#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace syncstab {

// Deterministic, locale-independent text output helpers. All numeric output
// uses 9 significant digits and '\n' line endings.

std::string fmt9(double v);
std::string fmt17(double v);

double to_deg(double rad);
double to_rad(double deg);

std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

/// Writes the whole file in binary mode (no newline translation).
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace syncstab
