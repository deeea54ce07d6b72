#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pebblemark {

using Bytes = std::vector<std::uint8_t>;

/// SHA-256 of a byte span (OpenSSL-backed).
std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);

std::string to_hex(std::span<const std::uint8_t> data);
Bytes from_hex(const std::string& hex);  // throws std::invalid_argument on bad input

/// Append a 64-bit big-endian integer to a buffer. Fixed-width encodings keep
/// oracle queries prefix-free across fields.
void append_u64(Bytes& out, std::uint64_t v);

inline void append_bytes(Bytes& out, std::span<const std::uint8_t> data) {
  out.insert(out.end(), data.begin(), data.end());
}

/// SHA-256 over the concatenation of several byte fields.
std::array<std::uint8_t, 32> sha256_cat(std::initializer_list<std::span<const std::uint8_t>> fields);

}  // namespace pebblemark
