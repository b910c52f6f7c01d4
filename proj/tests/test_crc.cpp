#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "nrlink/crc.hpp"
#include "nrlink/rng.hpp"

using namespace nrlink;

namespace {

std::vector<std::uint8_t> bits_from_u32(std::uint32_t v, int n) {
  std::vector<std::uint8_t> out(n);
  for (int i = 0; i < n; ++i) out[i] = (v >> (n - 1 - i)) & 1u;
  return out;
}

}  // namespace

TEST_CASE("crc24a frozen reference values") {
  CHECK(crc24a({}) == 0x000000u);
  CHECK(crc24a({0}) == 0x000000u);
  CHECK(crc24a({1}) == 0x864cfbu);

  std::vector<std::uint8_t> pat;
  for (int r = 0; r < 3; ++r)
    for (std::uint8_t b : {1, 0, 1, 1, 0, 0, 1, 0}) pat.push_back(b);
  CHECK(crc24a(pat) == 0x03cba7u);

  CHECK(crc24a(bits_from_u32(0xdeadbeefu, 32)) == 0x6432c5u);
}

TEST_CASE("appended crc verifies and rechecks to zero remainder") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint8_t> m(24 + (rng.next_u64() % 200));
    for (auto& b : m) b = rng.next_u64() & 1u;
    auto full = m;
    crc24a_append(full);
    REQUIRE(full.size() == m.size() + 24);
    CHECK(crc24a_check(full));
    CHECK(crc24a(full) == 0u);
  }
}

TEST_CASE("crc detects single and double bit flips") {
  Rng rng(32);
  std::vector<std::uint8_t> m(120);
  for (auto& b : m) b = rng.next_u64() & 1u;
  crc24a_append(m);

  for (std::size_t i = 0; i < m.size(); ++i) {
    auto bad = m;
    bad[i] ^= 1u;
    CHECK_FALSE(crc24a_check(bad));
  }
  for (int trial = 0; trial < 200; ++trial) {
    auto bad = m;
    const std::size_t a = rng.next_u64() % m.size();
    std::size_t b = rng.next_u64() % m.size();
    while (b == a) b = rng.next_u64() % m.size();
    bad[a] ^= 1u;
    bad[b] ^= 1u;
    CHECK_FALSE(crc24a_check(bad));
  }
}

TEST_CASE("blocks shorter than the crc never verify") {
  CHECK_FALSE(crc24a_check({}));
  CHECK_FALSE(crc24a_check(std::vector<std::uint8_t>(23, 0)));
}
