#pragma once

#include <cstdint>

#include "nrlink/fft.hpp"
#include "nrlink/rng.hpp"

namespace nrlink {

// Counter-based QPSK pilot value: stateless, so transmitter and receiver can
// evaluate any (seed, key) pair independently and in any order.
inline cplx pilot_qpsk(std::uint64_t seed, std::uint64_t key) {
  const std::uint64_t u = splitmix64(seed ^ splitmix64(key));
  const double re = ((u & 1u) ? -1.0 : 1.0) * kInvSqrt2;
  const double im = (((u >> 1) & 1u) ? -1.0 : 1.0) * kInvSqrt2;
  return {re, im};
}

namespace detail {

inline constexpr std::uint64_t kDmrsSalt = 0x646d7273ULL;  // "dmrs"
inline constexpr std::uint64_t kPtrsSalt = 0x70747273ULL;  // "ptrs"

}  // namespace detail

// Demodulation pilots live on one symbol per slot and vary per subcarrier.
inline cplx dmrs_value(std::uint64_t seed, std::size_t slot, std::size_t sym,
                       std::size_t sc) {
  const std::uint64_t key = (static_cast<std::uint64_t>(slot) << 32) ^
                            (static_cast<std::uint64_t>(sym) << 16) ^
                            static_cast<std::uint64_t>(sc) ^ detail::kDmrsSalt;
  return pilot_qpsk(seed, key);
}

// Phase-tracking pilots repeat the same value on every symbol of a slot for a
// given tone, so per-symbol phase estimates compare like against like.
inline cplx ptrs_value(std::uint64_t seed, std::size_t slot, std::size_t sc) {
  const std::uint64_t key = (static_cast<std::uint64_t>(slot) << 32) ^
                            static_cast<std::uint64_t>(sc) ^ detail::kPtrsSalt;
  return pilot_qpsk(seed, key);
}

}  // namespace nrlink
