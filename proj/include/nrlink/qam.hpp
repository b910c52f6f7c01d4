#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrlink/fft.hpp"

namespace nrlink {

enum class Modulation { kQam64, kQam256 };

inline int bits_per_symbol(Modulation m) {
  return m == Modulation::kQam64 ? 6 : 8;
}

inline std::string to_string(Modulation m) {
  return m == Modulation::kQam64 ? "64qam" : "256qam";
}

inline Modulation modulation_from_string(const std::string& s) {
  if (s == "64qam") return Modulation::kQam64;
  if (s == "256qam") return Modulation::kQam256;
  throw std::invalid_argument("unknown modulation: " + s);
}

namespace detail {

// Unit-average-energy scale factors: axis levels {1,3,..} have mean square 21
// (64QAM) and 85 (256QAM) per axis.
inline constexpr double kScale64 = 0.15430334996209191;   // 1/sqrt(42)
inline constexpr double kScale256 = 0.07669649888473704;  // 1/sqrt(170)

inline int axis_level_64(int b_sign, int b_mid, int b_low) {
  return (1 - 2 * b_sign) * (4 - (1 - 2 * b_mid) * (2 - (1 - 2 * b_low)));
}

inline int axis_level_256(int b_sign, int b2, int b4, int b6) {
  return (1 - 2 * b_sign) * (8 - (1 - 2 * b2) * (4 - (1 - 2 * b4) * (2 - (1 - 2 * b6))));
}

struct SlicerTables {
  std::array<std::array<std::uint8_t, 3>, 8> q64;    // index (level+7)/2
  std::array<std::array<std::uint8_t, 4>, 16> q256;  // index (level+15)/2
};

inline const SlicerTables& slicer_tables() {
  static const SlicerTables t = [] {
    SlicerTables s{};
    for (int b0 = 0; b0 < 2; ++b0)
      for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2) {
          const int lvl = axis_level_64(b0, b1, b2);
          s.q64[static_cast<std::size_t>((lvl + 7) / 2)] = {
              static_cast<std::uint8_t>(b0), static_cast<std::uint8_t>(b1),
              static_cast<std::uint8_t>(b2)};
        }
    for (int b0 = 0; b0 < 2; ++b0)
      for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2)
          for (int b3 = 0; b3 < 2; ++b3) {
            const int lvl = axis_level_256(b0, b1, b2, b3);
            s.q256[static_cast<std::size_t>((lvl + 15) / 2)] = {
                static_cast<std::uint8_t>(b0), static_cast<std::uint8_t>(b1),
                static_cast<std::uint8_t>(b2), static_cast<std::uint8_t>(b3)};
          }
    return s;
  }();
  return t;
}

// Nearest odd level index; exact boundary hits resolve toward the lower level.
inline int slice_index(double t, int n_levels) {
  const double half = n_levels - 2;  // boundary magnitude: 6 or 14
  int idx = static_cast<int>(std::ceil((t + half) / 2.0));
  if (idx < 0) idx = 0;
  if (idx > n_levels - 1) idx = n_levels - 1;
  return idx;
}

}  // namespace detail

inline cplx qam_modulate_symbol(Modulation m, const std::uint8_t* b) {
  if (m == Modulation::kQam64) {
    const int i = detail::axis_level_64(b[0], b[2], b[4]);
    const int q = detail::axis_level_64(b[1], b[3], b[5]);
    return {i * detail::kScale64, q * detail::kScale64};
  }
  const int i = detail::axis_level_256(b[0], b[2], b[4], b[6]);
  const int q = detail::axis_level_256(b[1], b[3], b[5], b[7]);
  return {i * detail::kScale256, q * detail::kScale256};
}

inline void qam_demodulate_symbol(Modulation m, cplx y, std::uint8_t* out) {
  const auto& tab = detail::slicer_tables();
  if (m == Modulation::kQam64) {
    const int ii = detail::slice_index(y.real() / detail::kScale64, 8);
    const int qi = detail::slice_index(y.imag() / detail::kScale64, 8);
    out[0] = tab.q64[ii][0];
    out[2] = tab.q64[ii][1];
    out[4] = tab.q64[ii][2];
    out[1] = tab.q64[qi][0];
    out[3] = tab.q64[qi][1];
    out[5] = tab.q64[qi][2];
    return;
  }
  const int ii = detail::slice_index(y.real() / detail::kScale256, 16);
  const int qi = detail::slice_index(y.imag() / detail::kScale256, 16);
  for (int k = 0; k < 4; ++k) {
    out[2 * k] = tab.q256[ii][k];
    out[2 * k + 1] = tab.q256[qi][k];
  }
}

inline std::vector<cplx> qam_modulate(Modulation m, const std::vector<std::uint8_t>& bits) {
  const std::size_t bps = static_cast<std::size_t>(bits_per_symbol(m));
  if (bits.size() % bps != 0) {
    throw std::invalid_argument("bit count not a multiple of bits per symbol");
  }
  std::vector<cplx> out(bits.size() / bps);
  for (std::size_t s = 0; s < out.size(); ++s) {
    out[s] = qam_modulate_symbol(m, bits.data() + s * bps);
  }
  return out;
}

inline std::vector<std::uint8_t> qam_demodulate(Modulation m, const std::vector<cplx>& syms) {
  const std::size_t bps = static_cast<std::size_t>(bits_per_symbol(m));
  std::vector<std::uint8_t> out(syms.size() * bps);
  for (std::size_t s = 0; s < syms.size(); ++s) {
    qam_demodulate_symbol(m, syms[s], out.data() + s * bps);
  }
  return out;
}

}  // namespace nrlink
