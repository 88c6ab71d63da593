#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace amerop {

/// Hex SHA-256 digest.
std::string sha256_hex(const std::vector<std::uint8_t>& bytes);
std::string sha256_hex(std::string_view text);

/// Labeled stream derivation: one root seed fans out to independent,
/// reproducible sub-seeds keyed by a purpose string.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);
std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index);

}  // namespace amerop
