#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace discussrag {

inline constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr uint64_t kFnvPrime = 0x100000001b3ull;

// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
constexpr uint64_t fnv1a64(std::string_view data, uint64_t state = kFnvOffset) {
  for (unsigned char c : data) {
    state ^= c;
    state *= kFnvPrime;
  }
  return state;
}

constexpr uint64_t fnv1a64_byte(uint8_t byte, uint64_t state) {
  state ^= byte;
  state *= kFnvPrime;
  return state;
}

// 16 lowercase hex digits.
std::string to_hex16(uint64_t value);

// Collapses every run of whitespace to a single space and trims both ends.
std::string normalize_whitespace(std::string_view text);

std::string trim(std::string_view text);

std::string to_lower(std::string_view text);

}  // namespace discussrag
