#pragma once

// Binary sieve cache:
//   "LSL1" | u16 version | u64 limit | u8 class tag | packed values
// Integers are little-endian. Values f(1..limit) are packed four per byte,
// least significant bits first, as 2-bit codes 00 = 0, 01 = +1, 11 = -1.
// Only classes F0 (tag 1) and F1 (tag 2) are cacheable.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "lsl/multiplicative.hpp"

namespace lsl {

inline constexpr std::uint16_t kCacheFormatVersion = 1;

std::vector<std::uint8_t> encode_sieve_cache(const ValueTable& table, std::uint16_t version = kCacheFormatVersion);
ValueTable decode_sieve_cache(const std::vector<std::uint8_t>& bytes);

void write_sieve_cache(const std::filesystem::path& path, const ValueTable& table);
ValueTable read_sieve_cache(const std::filesystem::path& path);

}  // namespace lsl
