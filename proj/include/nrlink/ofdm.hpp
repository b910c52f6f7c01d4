#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nrlink/carrier.hpp"
#include "nrlink/fft.hpp"
#include "nrlink/grid.hpp"

namespace nrlink {

// DC-centred mapping: subcarrier k sits at baseband frequency (k - n_sc/2)*scs.
inline std::size_t subcarrier_bin(const CarrierConfig& cc, std::size_t k) {
  return (k + cc.nfft - cc.n_subcarriers() / 2) % cc.nfft;
}

// IFFT per symbol with 1/sqrt(nfft) scaling (unitary over the FFT window),
// cyclic prefix prepended. first_slot sets the cyclic prefix schedule when the
// grid does not start at a half-ms boundary.
inline std::vector<cplx> ofdm_modulate(const CarrierConfig& cc,
                                       const std::vector<ResourceGrid>& slots,
                                       std::size_t first_slot = 0) {
  cc.validate();
  const std::size_t n_sc = cc.n_subcarriers();
  std::size_t total = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    total += cc.slot_samples(first_slot + i);
  }
  std::vector<cplx> out;
  out.reserve(total);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cc.nfft));
  std::vector<cplx> work(cc.nfft);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const ResourceGrid& g = slots[i];
    if (g.n_sc != n_sc || g.n_sym != cc.symbols_per_slot) {
      throw std::invalid_argument("grid does not match the carrier");
    }
    for (std::size_t sym = 0; sym < cc.symbols_per_slot; ++sym) {
      std::fill(work.begin(), work.end(), cplx(0.0, 0.0));
      for (std::size_t k = 0; k < n_sc; ++k) {
        work[subcarrier_bin(cc, k)] = g.at(k, sym);
      }
      ifft(work);
      for (auto& v : work) v *= scale;
      const std::size_t cp = cc.cp_length(first_slot + i, sym);
      out.insert(out.end(), work.end() - static_cast<std::ptrdiff_t>(cp), work.end());
      out.insert(out.end(), work.begin(), work.end());
    }
  }
  return out;
}

// FFT per symbol, cyclic prefix skipped. Trailing samples beyond n_slots are
// ignored; too few samples throw.
inline std::vector<ResourceGrid> ofdm_demodulate(const CarrierConfig& cc,
                                                 const std::vector<cplx>& samples,
                                                 std::size_t n_slots,
                                                 std::size_t first_slot = 0) {
  cc.validate();
  const std::size_t n_sc = cc.n_subcarriers();
  std::size_t need = 0;
  for (std::size_t i = 0; i < n_slots; ++i) need += cc.slot_samples(first_slot + i);
  if (samples.size() < need) {
    throw std::invalid_argument("not enough samples for the requested slots");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(cc.nfft));
  std::vector<ResourceGrid> out;
  out.reserve(n_slots);
  std::size_t pos = 0;
  std::vector<cplx> work(cc.nfft);
  for (std::size_t i = 0; i < n_slots; ++i) {
    ResourceGrid g(n_sc, cc.symbols_per_slot);
    for (std::size_t sym = 0; sym < cc.symbols_per_slot; ++sym) {
      pos += cc.cp_length(first_slot + i, sym);
      std::copy(samples.begin() + static_cast<std::ptrdiff_t>(pos),
                samples.begin() + static_cast<std::ptrdiff_t>(pos + cc.nfft),
                work.begin());
      fft(work);
      for (std::size_t k = 0; k < n_sc; ++k) {
        g.at(k, sym) = work[subcarrier_bin(cc, k)] * scale;
      }
      pos += cc.nfft;
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace nrlink
