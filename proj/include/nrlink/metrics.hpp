#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nrlink/fft.hpp"

namespace nrlink {

// Root-mean-square error vector magnitude, percent of the reference rms.
inline double evm_pct(const std::vector<cplx>& eq, const std::vector<cplx>& ref) {
  if (eq.size() != ref.size() || eq.empty()) {
    throw std::invalid_argument("evm needs matching non-empty vectors");
  }
  double err = 0.0, pwr = 0.0;
  for (std::size_t i = 0; i < eq.size(); ++i) {
    err += std::norm(eq[i] - ref[i]);
    pwr += std::norm(ref[i]);
  }
  if (pwr <= 0.0) throw std::invalid_argument("reference has no power");
  return 100.0 * std::sqrt(err / pwr);
}

inline double evm_db_from_pct(double pct) {
  if (pct < 0.0) throw std::invalid_argument("negative evm");
  if (pct == 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(pct / 100.0);
}

inline double evm_pct_from_db(double db) { return 100.0 * std::pow(10.0, db / 20.0); }

inline double bit_error_rate(const std::vector<std::uint8_t>& got,
                             const std::vector<std::uint8_t>& want) {
  if (got.size() != want.size() || got.empty()) {
    throw std::invalid_argument("ber needs matching non-empty vectors");
  }
  std::size_t errors = 0;
  for (std::size_t i = 0; i < got.size(); ++i) errors += got[i] != want[i];
  return static_cast<double>(errors) / static_cast<double>(got.size());
}

struct LinkMetrics {
  double evm_pct = 0.0;
  double evm_db = 0.0;
  double ber = 0.0;
  double bler = 0.0;
  std::size_t n_bits = 0;
  std::size_t n_blocks = 0;
};

}  // namespace nrlink
