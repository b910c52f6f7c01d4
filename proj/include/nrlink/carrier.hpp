#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "nrlink/fft.hpp"

namespace nrlink {

// OFDM numerology. Defaults are the 60 kHz / 66 RB mmWave carrier used
// throughout: 61.44 Msps, 792 active subcarriers, 14-symbol slots.
struct CarrierConfig {
  std::size_t nfft = 1024;
  double scs_hz = 60e3;
  std::size_t n_rb = 66;
  std::size_t symbols_per_slot = 14;

  double sample_rate() const { return scs_hz * static_cast<double>(nfft); }
  std::size_t n_subcarriers() const { return n_rb * 12; }
  std::size_t slots_per_ms() const {
    return static_cast<std::size_t>(std::llround(scs_hz / 15e3));
  }
  std::size_t slots_per_frame() const { return slots_per_ms() * 10; }
  std::size_t samples_per_ms() const {
    return static_cast<std::size_t>(std::llround(sample_rate() / 1000.0));
  }

  // Base cyclic prefix, 72 at nfft 1024. The per-ms sample residual is split
  // evenly over the two half-ms boundary symbols (104 at this numerology),
  // keeping every millisecond exactly sample_rate/1000 samples long.
  std::size_t cp_base() const { return nfft * 9 / 128; }

  std::size_t cp_extra() const {
    const std::size_t sym_ms = symbols_per_slot * slots_per_ms();
    return (samples_per_ms() - sym_ms * (nfft + cp_base())) / 2;
  }

  std::size_t cp_length(std::size_t slot, std::size_t sym) const {
    const std::size_t r = slots_per_ms();
    const std::size_t g = (slot % r) * symbols_per_slot + sym;
    return cp_base() + ((g % (7 * r) == 0) ? cp_extra() : 0);
  }

  std::size_t slot_samples(std::size_t slot) const {
    std::size_t total = 0;
    for (std::size_t s = 0; s < symbols_per_slot; ++s) {
      total += cp_length(slot, s) + nfft;
    }
    return total;
  }

  void validate() const {
    if (!is_pow2(nfft) || nfft < 128) {
      throw std::invalid_argument("nfft must be a power of two >= 128");
    }
    if (symbols_per_slot != 14) {
      throw std::invalid_argument("only 14-symbol slots are supported");
    }
    const double r = scs_hz / 15e3;
    if (r < 1.0 || std::abs(r - std::round(r)) > 1e-9) {
      throw std::invalid_argument("scs must be an integer multiple of 15 kHz");
    }
    if (n_rb == 0 || n_subcarriers() > nfft) {
      throw std::invalid_argument("active subcarriers exceed nfft");
    }
    const double per_ms = sample_rate() / 1000.0;
    if (std::abs(per_ms - std::round(per_ms)) > 1e-6) {
      throw std::invalid_argument("sample rate must be an integer per millisecond");
    }
    const std::size_t sym_ms = symbols_per_slot * slots_per_ms();
    const std::size_t floor_ms = sym_ms * (nfft + cp_base());
    if (samples_per_ms() < floor_ms || (samples_per_ms() - floor_ms) % 2 != 0) {
      throw std::invalid_argument("cp residual must be non-negative and even");
    }
  }
};

inline CarrierConfig nr_60khz_66rb() { return CarrierConfig{}; }

}  // namespace nrlink
