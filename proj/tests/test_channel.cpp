#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nrlink/channel.hpp"
#include "nrlink/ofdm.hpp"
#include "nrlink/rng.hpp"

using namespace nrlink;

TEST_CASE("tap delays quantize to samples at 61.44 Msps") {
  Rng rng(1);
  const auto ch = tdl_realize(tdl3(), 61.44e6, 1, 1, rng);
  REQUIRE(ch.delays.size() == 3);
  CHECK(ch.delays[0] == 0);
  CHECK(ch.delays[1] == 3);  // 50 ns * 61.44 MHz = 3.072
  CHECK(ch.delays[2] == 7);  // 120 ns * 61.44 MHz = 7.3728
}

TEST_CASE("tap powers normalize to unit total on average") {
  Rng rng(2);
  const int n_draws = 4000;
  double total = 0.0, tap0 = 0.0;
  for (int i = 0; i < n_draws; ++i) {
    const auto ch = tdl_realize(tdl3(), 61.44e6, 1, 1, rng);
    for (const auto& g : ch.gains) total += std::norm(g);
    tap0 += std::norm(ch.gains[0]);
  }
  CHECK(total / n_draws == Catch::Approx(1.0).epsilon(0.05));
  // strongest tap carries 1/(1 + 10^-0.3 + 10^-0.6) of the power
  const double want0 = 1.0 / (1.0 + std::pow(10.0, -0.3) + std::pow(10.0, -0.6));
  CHECK(tap0 / n_draws == Catch::Approx(want0).epsilon(0.07));
}

TEST_CASE("tap gains are circular complex gaussian") {
  Rng rng(3);
  const int n_draws = 8000;
  double re2 = 0.0, im2 = 0.0, cross = 0.0;
  for (int i = 0; i < n_draws; ++i) {
    const auto ch = tdl_realize(tdl_flat(), 61.44e6, 1, 1, rng);
    const cplx g = ch.gains[0];
    re2 += g.real() * g.real();
    im2 += g.imag() * g.imag();
    cross += g.real() * g.imag();
  }
  CHECK(re2 / n_draws == Catch::Approx(0.5).epsilon(0.08));
  CHECK(im2 / n_draws == Catch::Approx(0.5).epsilon(0.08));
  CHECK(std::abs(cross / n_draws) < 0.02);
}

TEST_CASE("doppler and malformed profiles are rejected") {
  Rng rng(4);
  TdlProfile moving = tdl_flat();
  moving.doppler_hz = 10.0;
  CHECK_THROWS_AS(tdl_realize(moving, 61.44e6, 1, 1, rng), std::invalid_argument);

  TdlProfile ragged{"x", {0.0, 10.0}, {0.0}, 0.0};
  CHECK_THROWS_AS(tdl_realize(ragged, 61.44e6, 1, 1, rng), std::invalid_argument);
}

TEST_CASE("unit flat channel is transparent") {
  ChannelRealization ch;
  ch.n_tx = 1;
  ch.n_rx = 1;
  ch.delays = {0};
  ch.gains = {cplx(1.0, 0.0)};
  Rng rng(5);
  std::vector<cplx> x(500);
  for (auto& v : x) v = rng.cnormal();
  const auto y = apply_channel(ch, {x});
  REQUIRE(y.size() == 1);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[0][i] == x[i]);
}

TEST_CASE("delayed taps match the frequency response through ofdm") {
  const CarrierConfig cc = nr_60khz_66rb();
  ChannelRealization ch;
  ch.n_tx = 1;
  ch.n_rx = 1;
  ch.delays = {0, 3, 7};
  ch.gains = {cplx(0.8, -0.1), cplx(-0.3, 0.4), cplx(0.1, 0.2)};

  Rng rng(6);
  ResourceGrid g(cc.n_subcarriers(), cc.symbols_per_slot);
  for (auto& v : g.re) v = rng.cnormal();
  const auto wave = ofdm_modulate(cc, {g}, 0);
  const auto rx = apply_channel(ch, {wave});
  const auto back = ofdm_demodulate(cc, rx[0], 1, 0);

  // prefix absorbs the delay spread, so each subcarrier just scales by H(k)
  for (std::size_t sym = 0; sym < cc.symbols_per_slot; ++sym) {
    for (std::size_t k = 0; k < cc.n_subcarriers(); ++k) {
      const std::size_t bin = subcarrier_bin(cc, k);
      cplx h = 0.0;
      for (std::size_t t = 0; t < ch.delays.size(); ++t) {
        const double ang = -2.0 * kPi * static_cast<double>(bin * ch.delays[t]) /
                           static_cast<double>(cc.nfft);
        h += ch.gains[t] * cplx(std::cos(ang), std::sin(ang));
      }
      REQUIRE(std::abs(back[0].at(k, sym) - h * g.at(k, sym)) < 1e-9);
    }
  }
}

TEST_CASE("multi-port response is the sum of single-port responses") {
  Rng rng(7);
  const auto ch = tdl_realize(tdl3(), 61.44e6, 2, 2, rng);
  std::vector<std::vector<cplx>> tx(2, std::vector<cplx>(300));
  for (auto& port : tx) {
    for (auto& v : port) v = rng.cnormal();
  }
  const auto y = apply_channel(ch, tx);

  ChannelRealization p0 = ch, p1 = ch;
  p0.n_tx = p1.n_tx = 1;
  p0.gains.clear();
  p1.gains.clear();
  for (std::size_t t = 0; t < ch.delays.size(); ++t) {
    for (std::size_t q = 0; q < ch.n_rx; ++q) {
      p0.gains.push_back(ch.gain(t, 0, q));
      p1.gains.push_back(ch.gain(t, 1, q));
    }
  }
  const auto y0 = apply_channel(p0, {tx[0]});
  const auto y1 = apply_channel(p1, {tx[1]});
  for (std::size_t q = 0; q < ch.n_rx; ++q) {
    for (std::size_t i = 0; i < tx[0].size(); ++i) {
      REQUIRE(std::abs(y[q][i] - (y0[q][i] + y1[q][i])) < 1e-12);
    }
  }
}

TEST_CASE("awgn hits the requested snr and reports its variance") {
  Rng sig_rng(8);
  std::vector<std::vector<cplx>> rx(2, std::vector<cplx>(40000));
  for (auto& ant : rx) {
    for (auto& v : ant) v = 2.0 * sig_rng.cnormal();  // signal power 4
  }
  auto clean = rx;
  Rng noise_rng(9);
  const double var = add_awgn(rx, 10.0, noise_rng);
  CHECK(var == Catch::Approx(4.0 * 0.1).epsilon(0.02));

  double measured = 0.0;
  for (std::size_t a = 0; a < rx.size(); ++a) {
    for (std::size_t i = 0; i < rx[a].size(); ++i) {
      measured += std::norm(rx[a][i] - clean[a][i]);
    }
  }
  measured /= 2.0 * 40000.0;
  CHECK(measured == Catch::Approx(var).epsilon(0.03));
}

TEST_CASE("no-noise sentinel leaves the signal untouched") {
  Rng rng(10);
  std::vector<std::vector<cplx>> rx(1, std::vector<cplx>(100));
  for (auto& v : rx[0]) v = rng.cnormal();
  const auto before = rx;
  Rng noise_rng(11);
  CHECK(add_awgn(rx, std::nullopt, noise_rng) == 0.0);
  CHECK(rx == before);
}

TEST_CASE("awgn refuses a silent reference") {
  std::vector<std::vector<cplx>> rx(1, std::vector<cplx>(100, cplx(0.0, 0.0)));
  Rng rng(12);
  CHECK_THROWS_AS(add_awgn(rx, 10.0, rng), std::invalid_argument);
}
