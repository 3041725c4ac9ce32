#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mcaimem {

/// Writes via a sibling temp file and rename so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);

}  // namespace mcaimem
