#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nrlink/carrier.hpp"
#include "nrlink/crc.hpp"
#include "nrlink/fft.hpp"
#include "nrlink/grid.hpp"
#include "nrlink/ofdm.hpp"
#include "nrlink/qam.hpp"
#include "nrlink/refsig.hpp"

namespace nrlink {

// Per-slot channel state: one complex gain per subcarrier per rx antenna,
// treated as constant over the slot, plus a per-RE noise variance.
struct ChannelEstimate {
  std::vector<std::vector<cplx>> h;  // [rx][sc]
  double noise_var = 0.0;
};

struct CpeEstimate {
  std::vector<double> phi;  // one rotation per symbol
};

namespace detail {

// Time-domain samples of the demodulation pilot symbol of a given slot
// (fft window only, no prefix), used as the timing reference.
inline std::vector<cplx> dmrs_time_reference(const CarrierConfig& cc,
                                             const PdschConfig& pc, std::size_t slot) {
  std::vector<cplx> work(cc.nfft, cplx(0.0, 0.0));
  for (std::size_t sc = 0; sc < cc.n_subcarriers(); sc += 2) {
    work[subcarrier_bin(cc, sc)] = dmrs_value(pc.dmrs_seed, slot, pc.dmrs_symbol, sc);
  }
  ifft(work);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cc.nfft));
  for (auto& v : work) v *= scale;
  return work;
}

}  // namespace detail

// Cross-correlates the received streams against the slot-0 pilot symbol over
// offsets [0, max_offset] and returns the peak. Ties go to the earliest.
inline std::size_t estimate_timing(const CarrierConfig& cc, const PdschConfig& pc,
                                   const std::vector<std::vector<cplx>>& rx,
                                   std::size_t max_offset = 256) {
  cc.validate();
  if (rx.empty()) throw std::invalid_argument("no receive streams");
  const std::vector<cplx> ref = detail::dmrs_time_reference(cc, pc, 0);
  std::size_t sym_start = 0;
  for (std::size_t s = 0; s < pc.dmrs_symbol; ++s) sym_start += cc.cp_length(0, s) + cc.nfft;
  sym_start += cc.cp_length(0, pc.dmrs_symbol);

  const std::size_t need = sym_start + max_offset + cc.nfft;
  for (const auto& ant : rx) {
    if (ant.size() < need) throw std::invalid_argument("stream too short for timing search");
  }
  double best = -1.0;
  std::size_t best_tau = 0;
  for (std::size_t tau = 0; tau <= max_offset; ++tau) {
    double metric = 0.0;
    for (const auto& ant : rx) {
      cplx acc = 0.0;
      const cplx* base = ant.data() + sym_start + tau;
      for (std::size_t i = 0; i < cc.nfft; ++i) acc += base[i] * std::conj(ref[i]);
      metric += std::norm(acc);
    }
    if (metric > best) {
      best = metric;
      best_tau = tau;
    }
  }
  return best_tau;
}

// Least squares at the pilot comb, linear interpolation to the skipped
// subcarriers, linear extrapolation past the last pilot. The noise estimate
// comes from the residual of a short smoothing filter over interior pilots.
inline ChannelEstimate estimate_channel(const CarrierConfig& cc, const PdschConfig& pc,
                                        std::size_t slot,
                                        const std::vector<ResourceGrid>& rx_grids) {
  if (rx_grids.empty()) throw std::invalid_argument("no receive grids");
  const std::size_t n_sc = cc.n_subcarriers();
  const std::size_t sym = pc.dmrs_symbol;
  ChannelEstimate est;
  est.h.resize(rx_grids.size());

  double resid_acc = 0.0;
  std::size_t resid_n = 0;
  for (std::size_t a = 0; a < rx_grids.size(); ++a) {
    const ResourceGrid& g = rx_grids[a];
    if (g.n_sc != n_sc || g.n_sym != cc.symbols_per_slot) {
      throw std::invalid_argument("grid does not match the carrier");
    }
    std::vector<cplx> hp;  // pilot-position estimates, ascending subcarrier
    hp.reserve((n_sc + 1) / 2);
    for (std::size_t sc = 0; sc < n_sc; sc += 2) {
      hp.push_back(g.at(sc, sym) / dmrs_value(pc.dmrs_seed, slot, sym, sc));
    }
    for (std::size_t i = 1; i + 1 < hp.size(); ++i) {
      const cplx r = hp[i] - (0.25 * hp[i - 1] + 0.5 * hp[i] + 0.25 * hp[i + 1]);
      resid_acc += std::norm(r);
      ++resid_n;
    }
    std::vector<cplx>& h = est.h[a];
    h.resize(n_sc);
    for (std::size_t i = 0; i < hp.size(); ++i) h[2 * i] = hp[i];
    for (std::size_t sc = 1; sc < n_sc; sc += 2) {
      if (sc + 1 < n_sc) {
        h[sc] = 0.5 * (h[sc - 1] + h[sc + 1]);
      } else {
        h[sc] = h[sc - 1] + 0.5 * (h[sc - 1] - h[sc - 3]);
      }
    }
  }
  // residual = n_i/2 - n_{i-1}/4 - n_{i+1}/4 has variance 3/8 of the RE noise
  est.noise_var = resid_n > 0 ? (8.0 / 3.0) * resid_acc / static_cast<double>(resid_n) : 0.0;
  if (est.noise_var < 1e-12) est.noise_var = 1e-12;
  return est;
}

// Common phase error per symbol from the phase-tracking tones, combined
// coherently across tones and antennas. Symbols without tones inherit the
// nearest preceding estimate (or the first following one at the slot start).
inline CpeEstimate estimate_cpe(const CarrierConfig& cc, const PdschConfig& pc,
                                std::size_t slot,
                                const std::vector<ResourceGrid>& rx_grids,
                                const ChannelEstimate& est) {
  const std::size_t n_sc = cc.n_subcarriers();
  const std::size_t n_sym = cc.symbols_per_slot;
  if (rx_grids.size() != est.h.size()) {
    throw std::invalid_argument("antenna count mismatch");
  }
  CpeEstimate out;
  out.phi.assign(n_sym, 0.0);
  std::vector<bool> have(n_sym, false);
  for (std::size_t sym = 0; sym < n_sym; ++sym) {
    if (sym == pc.dmrs_symbol) continue;
    cplx acc = 0.0;
    for (std::size_t a = 0; a < rx_grids.size(); ++a) {
      for (std::size_t sc = 0; sc < n_sc; sc += pc.ptrs_spacing) {
        const cplx expect = est.h[a][sc] * ptrs_value(pc.ptrs_seed, slot, sc);
        acc += rx_grids[a].at(sc, sym) * std::conj(expect);
      }
    }
    double phi = std::atan2(acc.imag(), acc.real());
    if (phi == -kPi) phi = kPi;
    out.phi[sym] = phi;
    have[sym] = true;
  }
  for (std::size_t sym = 0; sym < n_sym; ++sym) {
    if (have[sym]) continue;
    bool filled = false;
    for (std::size_t back = sym; back-- > 0;) {
      if (have[back]) {
        out.phi[sym] = out.phi[back];
        filled = true;
        break;
      }
    }
    if (!filled) {
      for (std::size_t fwd = sym + 1; fwd < n_sym; ++fwd) {
        if (have[fwd]) {
          out.phi[sym] = out.phi[fwd];
          break;
        }
      }
    }
  }
  return out;
}

// Removes the estimated per-symbol rotation from every RE.
inline void compensate_cpe(std::vector<ResourceGrid>& rx_grids, const CpeEstimate& cpe) {
  for (auto& g : rx_grids) {
    if (g.n_sym != cpe.phi.size()) throw std::invalid_argument("symbol count mismatch");
    for (std::size_t sym = 0; sym < g.n_sym; ++sym) {
      const cplx rot(std::cos(cpe.phi[sym]), -std::sin(cpe.phi[sym]));
      for (std::size_t sc = 0; sc < g.n_sc; ++sc) g.at(sc, sym) *= rot;
    }
  }
}

// Single-layer MMSE combine across rx antennas. noise_var 0 reduces to
// zero-forcing; an all-zero channel is an error.
inline cplx equalize_mmse(const cplx* y, const cplx* h, std::size_t n_rx,
                          double noise_var) {
  cplx num = 0.0;
  double den = noise_var;
  for (std::size_t a = 0; a < n_rx; ++a) {
    num += std::conj(h[a]) * y[a];
    den += std::norm(h[a]);
  }
  if (den == 0.0) throw std::invalid_argument("degenerate equalizer");
  return num / den;
}

struct RecoverConfig {
  bool cpe_compensation = true;
  bool genie_timing = false;
  bool genie_noise_var = false;
  double true_noise_var = 0.0;  // used when genie_noise_var is set
};

struct SlotResult {
  std::vector<cplx> eq_symbols;    // data REs in grid fill order
  std::vector<std::uint8_t> bits;  // hard decisions, checksum tail included
  bool crc_ok = false;
  std::vector<double> cpe_phi;     // applied rotation per symbol (zeros when off)
  double noise_var = 0.0;
};

struct RecoverResult {
  std::size_t timing_offset = 0;
  std::vector<SlotResult> slots;
};

// Full receive chain: timing, demodulation, per-slot channel and phase
// estimation, equalization, hard decisions, checksum.
inline RecoverResult recover_pdsch(const CarrierConfig& cc, const PdschConfig& pc,
                                   const std::vector<std::vector<cplx>>& rx,
                                   std::size_t n_slots, const RecoverConfig& rc) {
  cc.validate();
  pc.validate(cc);
  if (rx.empty() || n_slots == 0) throw std::invalid_argument("nothing to recover");

  RecoverResult result;
  result.timing_offset = rc.genie_timing ? 0 : estimate_timing(cc, pc, rx);

  std::size_t need = 0;
  for (std::size_t s = 0; s < n_slots; ++s) need += cc.slot_samples(s);
  std::vector<std::vector<ResourceGrid>> grids_by_ant;  // [rx][slot]
  grids_by_ant.reserve(rx.size());
  for (const auto& ant : rx) {
    std::vector<cplx> trimmed(need, cplx(0.0, 0.0));
    const std::size_t avail =
        ant.size() > result.timing_offset ? ant.size() - result.timing_offset : 0;
    const std::size_t take = std::min(avail, need);
    std::copy(ant.begin() + static_cast<std::ptrdiff_t>(result.timing_offset),
              ant.begin() + static_cast<std::ptrdiff_t>(result.timing_offset + take),
              trimmed.begin());
    grids_by_ant.push_back(ofdm_demodulate(cc, trimmed, n_slots, 0));
  }

  const std::vector<Role> roles = slot_roles(cc, pc);
  const std::size_t n_sc = cc.n_subcarriers();
  result.slots.reserve(n_slots);
  std::vector<ResourceGrid> slot_grids(rx.size());
  for (std::size_t slot = 0; slot < n_slots; ++slot) {
    for (std::size_t a = 0; a < rx.size(); ++a) {
      slot_grids[a] = std::move(grids_by_ant[a][slot]);
    }
    ChannelEstimate est = estimate_channel(cc, pc, slot, slot_grids);
    if (rc.genie_noise_var) est.noise_var = rc.true_noise_var;

    SlotResult sr;
    if (rc.cpe_compensation) {
      const CpeEstimate cpe = estimate_cpe(cc, pc, slot, slot_grids, est);
      compensate_cpe(slot_grids, cpe);
      sr.cpe_phi = cpe.phi;
    } else {
      sr.cpe_phi.assign(cc.symbols_per_slot, 0.0);
    }
    sr.noise_var = est.noise_var;

    std::vector<cplx> y(rx.size()), h(rx.size());
    for (std::size_t sym = 0; sym < cc.symbols_per_slot; ++sym) {
      for (std::size_t sc = 0; sc < n_sc; ++sc) {
        if (roles[sym * n_sc + sc] != Role::kData) continue;
        for (std::size_t a = 0; a < rx.size(); ++a) {
          y[a] = slot_grids[a].at(sc, sym);
          h[a] = est.h[a][sc];
        }
        sr.eq_symbols.push_back(equalize_mmse(y.data(), h.data(), rx.size(), est.noise_var));
      }
    }
    sr.bits = qam_demodulate(pc.modulation, sr.eq_symbols);
    sr.crc_ok = crc24a_check(sr.bits);
    result.slots.push_back(std::move(sr));
  }
  return result;
}

}  // namespace nrlink
