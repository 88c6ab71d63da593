#include "amerop/seeding.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <memory>
#include <string>

#include "amerop/errors.hpp"

namespace amerop {

namespace {

std::array<unsigned char, 32> digest(const void* data, std::size_t n) {
    std::array<unsigned char, 32> out{};
    unsigned int len = 0;
    if (EVP_Digest(data, n, out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size()) {
        throw IoError("sha256 digest failed");
    }
    return out;
}

std::string to_hex(const std::array<unsigned char, 32>& d) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (unsigned char c : d) {
        s.push_back(kHex[c >> 4]);
        s.push_back(kHex[c & 0xf]);
    }
    return s;
}

}  // namespace

std::string sha256_hex(const std::vector<std::uint8_t>& bytes) { return to_hex(digest(bytes.data(), bytes.size())); }

std::string sha256_hex(std::string_view text) { return to_hex(digest(text.data(), text.size())); }

std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
    const std::string key = std::to_string(root) + "/" + std::string(label);
    const auto d = digest(key.data(), key.size());
    std::uint64_t seed = 0;
    for (int i = 0; i < 8; ++i) seed |= static_cast<std::uint64_t>(d[i]) << (8 * i);
    return seed;
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index) {
    return derive_seed(root, std::string(label) + "#" + std::to_string(index));
}

}  // namespace amerop
