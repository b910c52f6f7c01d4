#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace nrlink {

// CRC-24A, generator 0x1864CFB, zero initial state. Bits are one per byte,
// MSB-first order. Equivalent to the remainder of m(x)*x^24 mod g(x).
inline std::uint32_t crc24a(const std::vector<std::uint8_t>& bits, std::size_t len) {
  std::uint32_t reg = 0;
  for (std::size_t i = 0; i < len; ++i) {
    const std::uint32_t top = (reg >> 23) & 1u;
    reg = (reg << 1) & 0xffffffu;
    if (top ^ bits[i]) reg ^= 0x864cfbu;
  }
  return reg;
}

inline std::uint32_t crc24a(const std::vector<std::uint8_t>& bits) {
  return crc24a(bits, bits.size());
}

// Appends the 24 CRC bits (MSB first) computed over the current content.
inline void crc24a_append(std::vector<std::uint8_t>& bits) {
  const std::uint32_t c = crc24a(bits);
  for (int i = 23; i >= 0; --i) bits.push_back(static_cast<std::uint8_t>((c >> i) & 1u));
}

// True when the last 24 bits match the CRC of everything before them.
inline bool crc24a_check(const std::vector<std::uint8_t>& bits) {
  if (bits.size() < 24) return false;
  const std::uint32_t c = crc24a(bits, bits.size() - 24);
  for (int i = 0; i < 24; ++i) {
    if (bits[bits.size() - 24 + i] != ((c >> (23 - i)) & 1u)) return false;
  }
  return true;
}

}  // namespace nrlink
