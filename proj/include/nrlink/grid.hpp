#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nrlink/carrier.hpp"
#include "nrlink/crc.hpp"
#include "nrlink/qam.hpp"
#include "nrlink/refsig.hpp"
#include "nrlink/rng.hpp"

namespace nrlink {

enum class Role : std::uint8_t { kEmpty = 0, kData, kDmrs, kPtrs };

struct PdschConfig {
  std::size_t dmrs_symbol = 2;
  std::size_t ptrs_spacing = 24;  // subcarrier stride between phase-tracking tones
  Modulation modulation = Modulation::kQam64;
  std::uint64_t payload_seed = 1;
  std::uint64_t dmrs_seed = 2;
  std::uint64_t ptrs_seed = 3;

  void validate(const CarrierConfig& cc) const {
    if (dmrs_symbol >= cc.symbols_per_slot) {
      throw std::invalid_argument("dmrs symbol outside the slot");
    }
    if (ptrs_spacing == 0 || ptrs_spacing > cc.n_subcarriers()) {
      throw std::invalid_argument("bad ptrs spacing");
    }
  }
};

struct ResourceGrid {
  std::size_t n_sc = 0;
  std::size_t n_sym = 0;
  std::vector<cplx> re;

  ResourceGrid() = default;
  ResourceGrid(std::size_t sc, std::size_t sym)
      : n_sc(sc), n_sym(sym), re(sc * sym, cplx(0.0, 0.0)) {}

  cplx& at(std::size_t sc, std::size_t sym) { return re[sym * n_sc + sc]; }
  const cplx& at(std::size_t sc, std::size_t sym) const { return re[sym * n_sc + sc]; }
};

// Role of every RE in a slot, indexed sym * n_sc + sc. The demodulation
// pilot symbol carries pilots on even subcarriers and nothing else; all other
// symbols carry data with phase-tracking tones every ptrs_spacing subcarriers.
inline std::vector<Role> slot_roles(const CarrierConfig& cc, const PdschConfig& pc) {
  pc.validate(cc);
  const std::size_t n_sc = cc.n_subcarriers();
  std::vector<Role> roles(n_sc * cc.symbols_per_slot, Role::kData);
  for (std::size_t sym = 0; sym < cc.symbols_per_slot; ++sym) {
    for (std::size_t sc = 0; sc < n_sc; ++sc) {
      Role& r = roles[sym * n_sc + sc];
      if (sym == pc.dmrs_symbol) {
        r = (sc % 2 == 0) ? Role::kDmrs : Role::kEmpty;
      } else if (sc % pc.ptrs_spacing == 0) {
        r = Role::kPtrs;
      }
    }
  }
  return roles;
}

struct RoleCounts {
  std::size_t data = 0, dmrs = 0, ptrs = 0, empty = 0;
};

inline RoleCounts count_roles(const std::vector<Role>& roles) {
  RoleCounts c;
  for (Role r : roles) {
    switch (r) {
      case Role::kData: ++c.data; break;
      case Role::kDmrs: ++c.dmrs; break;
      case Role::kPtrs: ++c.ptrs; break;
      case Role::kEmpty: ++c.empty; break;
    }
  }
  return c;
}

inline std::size_t n_data_re(const CarrierConfig& cc, const PdschConfig& pc) {
  return count_roles(slot_roles(cc, pc)).data;
}

// One transport block: payload bits with a 24-bit checksum tail, sized to fill
// a slot's data REs exactly.
struct BitBlock {
  std::vector<std::uint8_t> bits;
};

inline BitBlock make_block(std::size_t n_bits, Rng& rng) {
  if (n_bits <= 24) throw std::invalid_argument("block too small for checksum");
  BitBlock b;
  b.bits.reserve(n_bits);
  for (std::size_t i = 0; i < n_bits - 24; ++i) {
    b.bits.push_back(static_cast<std::uint8_t>(rng.next_u64() & 1u));
  }
  crc24a_append(b.bits);
  return b;
}

inline ResourceGrid build_slot_grid(const CarrierConfig& cc, const PdschConfig& pc,
                                    std::size_t slot, const BitBlock& block) {
  cc.validate();
  const std::vector<Role> roles = slot_roles(cc, pc);
  const std::size_t n_sc = cc.n_subcarriers();
  const std::size_t bps = static_cast<std::size_t>(bits_per_symbol(pc.modulation));
  const std::size_t need = count_roles(roles).data * bps;
  if (block.bits.size() != need) {
    throw std::invalid_argument("block size does not fill the slot");
  }
  const std::vector<cplx> data = qam_modulate(pc.modulation, block.bits);

  ResourceGrid g(n_sc, cc.symbols_per_slot);
  std::size_t di = 0;
  for (std::size_t sym = 0; sym < cc.symbols_per_slot; ++sym) {
    for (std::size_t sc = 0; sc < n_sc; ++sc) {
      switch (roles[sym * n_sc + sc]) {
        case Role::kData: g.at(sc, sym) = data[di++]; break;
        case Role::kDmrs: g.at(sc, sym) = dmrs_value(pc.dmrs_seed, slot, sym, sc); break;
        case Role::kPtrs: g.at(sc, sym) = ptrs_value(pc.ptrs_seed, slot, sc); break;
        case Role::kEmpty: break;
      }
    }
  }
  return g;
}

// Data REs in the fill order build_slot_grid used (symbol-major).
inline std::vector<cplx> extract_data(const ResourceGrid& g, const std::vector<Role>& roles) {
  std::vector<cplx> out;
  out.reserve(roles.size());
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (roles[i] == Role::kData) out.push_back(g.re[i]);
  }
  return out;
}

}  // namespace nrlink
