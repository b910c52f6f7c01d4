#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "nrlink/grid.hpp"

using namespace nrlink;

namespace {

const CarrierConfig cc = nr_60khz_66rb();
const PdschConfig pc{};

}  // namespace

TEST_CASE("role counts for the default allocation") {
  const auto roles = slot_roles(cc, pc);
  REQUIRE(roles.size() == 792 * 14);
  const RoleCounts c = count_roles(roles);
  CHECK(c.data == 9867);
  CHECK(c.dmrs == 396);
  CHECK(c.ptrs == 429);
  CHECK(c.empty == 396);
  CHECK(c.data + c.dmrs + c.ptrs + c.empty == 792 * 14);
}

TEST_CASE("pilot placement") {
  const auto roles = slot_roles(cc, pc);
  const std::size_t n_sc = cc.n_subcarriers();
  for (std::size_t sym = 0; sym < 14; ++sym) {
    for (std::size_t sc = 0; sc < n_sc; ++sc) {
      const Role r = roles[sym * n_sc + sc];
      if (sym == 2) {
        CHECK(r == (sc % 2 == 0 ? Role::kDmrs : Role::kEmpty));
      } else {
        CHECK(r == (sc % 24 == 0 ? Role::kPtrs : Role::kData));
      }
    }
  }
}

TEST_CASE("pilot values are unit-magnitude qpsk and deterministic") {
  std::set<std::pair<double, double>> seen;
  for (std::size_t sc = 0; sc < 792; sc += 2) {
    const cplx v = dmrs_value(7, 0, 2, sc);
    CHECK(std::abs(std::abs(v.real()) - kInvSqrt2) < 1e-15);
    CHECK(std::abs(std::abs(v.imag()) - kInvSqrt2) < 1e-15);
    CHECK(v == dmrs_value(7, 0, 2, sc));
    seen.insert({v.real(), v.imag()});
  }
  CHECK(seen.size() == 4);  // all four qpsk points appear across the comb

  // same key, different seed differs somewhere
  bool diff = false;
  for (std::size_t sc = 0; sc < 792; sc += 2) {
    if (dmrs_value(7, 0, 2, sc) != dmrs_value(8, 0, 2, sc)) diff = true;
  }
  CHECK(diff);
}

TEST_CASE("phase tracking tones repeat across symbols, vary across tones") {
  const cplx v0 = ptrs_value(3, 5, 24);
  CHECK(v0 == ptrs_value(3, 5, 24));
  bool vary_sc = false, vary_slot = false;
  for (std::size_t sc = 0; sc < 792; sc += 24) {
    if (ptrs_value(3, 5, sc) != v0) vary_sc = true;
    if (ptrs_value(3, 6, sc) != ptrs_value(3, 5, sc)) vary_slot = true;
  }
  CHECK(vary_sc);
  CHECK(vary_slot);
}

TEST_CASE("block construction carries a verifying checksum") {
  Rng rng(11);
  const std::size_t n_bits = n_data_re(cc, pc) * 6;
  CHECK(n_bits == 59202);
  const BitBlock b = make_block(n_bits, rng);
  REQUIRE(b.bits.size() == n_bits);
  CHECK(crc24a_check(b.bits));

  auto corrupted = b.bits;
  corrupted[100] ^= 1u;
  CHECK_FALSE(crc24a_check(corrupted));

  CHECK_THROWS_AS(make_block(24, rng), std::invalid_argument);
}

TEST_CASE("slot grid places data, pilots, and gaps") {
  Rng rng(21);
  const std::size_t n_bits = n_data_re(cc, pc) * 6;
  const BitBlock b = make_block(n_bits, rng);
  const ResourceGrid g = build_slot_grid(cc, pc, 4, b);
  REQUIRE(g.n_sc == 792);
  REQUIRE(g.n_sym == 14);

  const auto roles = slot_roles(cc, pc);
  const auto want_data = qam_modulate(pc.modulation, b.bits);
  std::size_t di = 0;
  for (std::size_t sym = 0; sym < 14; ++sym) {
    for (std::size_t sc = 0; sc < 792; ++sc) {
      const cplx v = g.at(sc, sym);
      switch (roles[sym * 792 + sc]) {
        case Role::kData:
          CHECK(v == want_data[di++]);
          break;
        case Role::kDmrs:
          CHECK(v == dmrs_value(pc.dmrs_seed, 4, sym, sc));
          break;
        case Role::kPtrs:
          CHECK(v == ptrs_value(pc.ptrs_seed, 4, sc));
          break;
        case Role::kEmpty:
          CHECK(v == cplx(0.0, 0.0));
          break;
      }
    }
  }
  CHECK(di == want_data.size());

  // extraction returns the payload symbols in fill order
  CHECK(extract_data(g, roles) == want_data);
}

TEST_CASE("grid build rejects wrong block sizes") {
  Rng rng(5);
  const BitBlock small = make_block(600, rng);
  CHECK_THROWS_AS(build_slot_grid(cc, pc, 0, small), std::invalid_argument);
}

TEST_CASE("pdsch validation") {
  PdschConfig bad = pc;
  bad.dmrs_symbol = 14;
  CHECK_THROWS_AS(slot_roles(cc, bad), std::invalid_argument);
  bad = pc;
  bad.ptrs_spacing = 0;
  CHECK_THROWS_AS(slot_roles(cc, bad), std::invalid_argument);
}
