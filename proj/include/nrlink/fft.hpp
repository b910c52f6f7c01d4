#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nrlink/rng.hpp"

namespace nrlink {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

namespace detail {

// tw[k] = exp(-2*pi*i*k/n) for k < n/2, cached per thread per size.
inline const std::vector<cplx>& twiddles(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::vector<cplx>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> tw(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double a = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    tw[k] = {std::cos(a), std::sin(a)};
  }
  return cache.emplace(n, std::move(tw)).first->second;
}

inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const auto& tw = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cplx w = tw[k * stride];
        if (inverse) w = std::conj(w);
        const cplx u = a[i + k];
        const cplx v = a[i + k + half] * w;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
}

// Bluestein chirp-z for arbitrary sizes. Chirp angles use k^2 mod 2n in
// integer arithmetic so large indices keep full precision.
inline void fft_bluestein(std::vector<cplx>& x, bool inverse) {
  const std::size_t n = x.size();
  if (n <= 1) return;
  const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n);
  std::vector<cplx> b(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t q = (static_cast<std::uint64_t>(k) * k) % two_n;
    double ang = kPi * static_cast<double>(q) / static_cast<double>(n);
    if (inverse) ang = -ang;
    b[k] = {std::cos(ang), std::sin(ang)};
  }
  const std::size_t m = next_pow2(2 * n - 1);
  std::vector<cplx> fa(m), fb(m);
  for (std::size_t k = 0; k < n; ++k) fa[k] = x[k] * std::conj(b[k]);
  fb[0] = b[0];
  for (std::size_t k = 1; k < n; ++k) fb[k] = fb[m - k] = b[k];
  fft_pow2(fa, false);
  fft_pow2(fb, false);
  for (std::size_t k = 0; k < m; ++k) fa[k] *= fb[k];
  fft_pow2(fa, true);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) x[k] = std::conj(b[k]) * fa[k] * inv_m;
}

}  // namespace detail

// Unscaled DFT in place: X[k] = sum_j x[j] exp(-2*pi*i*j*k/n).
inline void fft(std::vector<cplx>& a) {
  if (is_pow2(a.size())) {
    detail::fft_pow2(a, false);
  } else {
    detail::fft_bluestein(a, false);
  }
}

// Unscaled inverse in place: x[j] = sum_k X[k] exp(+2*pi*i*j*k/n).
// Callers apply 1/n or matched 1/sqrt(n) pairs.
inline void ifft(std::vector<cplx>& a) {
  if (is_pow2(a.size())) {
    detail::fft_pow2(a, true);
  } else {
    detail::fft_bluestein(a, true);
  }
}

}  // namespace nrlink
