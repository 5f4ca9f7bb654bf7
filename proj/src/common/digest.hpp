#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace digirr {

std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& path);

// Hex of n cryptographically random bytes.
std::string random_hex(std::size_t n_bytes);

}  // namespace digirr
