#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nrlink/phase_noise.hpp"

using namespace nrlink;

TEST_CASE("psd is exactly the floor at zero offset") {
  CHECK(psd_at(pn_model_a(), 0.0) == -79.4);
  CHECK(psd_at(pn_model_b(), 0.0) == -70.0);
  CHECK(psd_at(pn_model_c(), 0.0) == 32.0);
}

TEST_CASE("psd frozen curve values") {
  const PhaseNoiseModel a = pn_model_a(), b = pn_model_b(), c = pn_model_c();
  CHECK(psd_at(a, 1e4) == Catch::Approx(-79.4538402964).margin(1e-8));
  CHECK(psd_at(a, 1e5) == Catch::Approx(-83.3577041982).margin(1e-8));
  CHECK(psd_at(a, 1e6) == Catch::Approx(-111.6736842329).margin(1e-8));
  CHECK(psd_at(a, 1e7) == Catch::Approx(-128.8150741805).margin(1e-8));
  CHECK(psd_at(b, 1e4) == Catch::Approx(-76.0245032053).margin(1e-8));
  CHECK(psd_at(b, 1e6) == Catch::Approx(-96.2531097392).margin(1e-8));
  CHECK(psd_at(b, 1e7) == Catch::Approx(-125.6768443587).margin(1e-8));
  CHECK(psd_at(c, 1e4) == Catch::Approx(44.6342721698).margin(1e-8));
  CHECK(psd_at(c, 1e6) == Catch::Approx(95.6029924451).margin(1e-8));
  CHECK(psd_at(c, 1e7) == Catch::Approx(88.9792479788).margin(1e-8));
}

TEST_CASE("far tail approaches the pole/zero corner ratio") {
  const double limit = -79.4 + 20.0 * std::log10(0.16 / 158.4);
  CHECK(psd_at(pn_model_a(), 1e12) == Catch::Approx(limit).margin(1e-6));
}

TEST_CASE("psd is symmetric in frequency") {
  const PhaseNoiseModel m = pn_model_b();
  for (double f : {1e3, 5e4, 2e6, 3e7}) {
    CHECK(psd_at(m, f) == psd_at(m, -f));
  }
}

TEST_CASE("preset identities") {
  CHECK(pn_preset("A").fc_ghz == 30.0);
  CHECK(pn_preset("B").fc_ghz == 60.0);
  CHECK(pn_preset("C").fc_ghz == 29.55);
  CHECK(pn_preset("C").az == std::vector<double>{2.37, 2.7, 2.53});
  CHECK(pn_preset("C").ap == std::vector<double>{3.3, 3.3, 1.0});
  CHECK_THROWS_AS(pn_preset("D"), std::invalid_argument);
}

TEST_CASE("model validation") {
  PhaseNoiseModel m = pn_model_a();
  m.az.pop_back();
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = pn_model_a();
  m.fp_hz[0] = 0.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("synthesis rejects bad lengths") {
  const PhaseNoiseModel m = pn_model_a();
  CHECK_THROWS_AS(synthesize_phase_noise(m, 61.44e6, 128, 1), std::invalid_argument);
  CHECK_THROWS_AS(synthesize_phase_noise(m, 61.44e6, 257, 1), std::invalid_argument);
  CHECK_NOTHROW(synthesize_phase_noise(m, 61.44e6, 300, 1));
}

TEST_CASE("synthesis is seed-deterministic") {
  const PhaseNoiseModel m = pn_model_a();
  const auto a = synthesize_phase_noise(m, 61.44e6, 4096, 42);
  const auto b = synthesize_phase_noise(m, 61.44e6, 4096, 42);
  const auto c = synthesize_phase_noise(m, 61.44e6, 4096, 43);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("trajectories have zero mean and finite values for all presets") {
  for (const auto& m : {pn_model_a(), pn_model_b(), pn_model_c()}) {
    const auto phi = synthesize_phase_noise(m, 61.44e6, 8192, 7);
    double mean = 0.0;
    bool finite = true;
    for (double v : phi) {
      mean += v;
      finite = finite && std::isfinite(v);
    }
    mean /= static_cast<double>(phi.size());
    INFO("model " << m.name);
    CHECK(finite);
    CHECK(std::abs(mean) < 1e-9 * (1.0 + std::abs(phi[0])));
  }
}

TEST_CASE("sample variance matches the band-limited psd integral") {
  const PhaseNoiseModel m = pn_model_a();
  const double fs = 61.44e6;
  const std::size_t n = 1 << 16;
  const double df = fs / static_cast<double>(n);
  double expected = 0.0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    expected += 2.0 * std::pow(10.0, psd_at(m, k * df) / 10.0) * df;
  }
  double got = 0.0;
  const int n_seeds = 24;
  for (int s = 0; s < n_seeds; ++s) {
    const auto phi = synthesize_phase_noise(m, fs, n, 1000 + s);
    for (double v : phi) got += v * v;
  }
  got /= static_cast<double>(n) * n_seeds;
  CHECK(got == Catch::Approx(expected).epsilon(0.3));
}

TEST_CASE("averaged periodogram tracks the psd within the estimation spread") {
  const PhaseNoiseModel m = pn_model_b();
  const double fs = 61.44e6;
  const std::size_t n = 1 << 14;
  const double df = fs / static_cast<double>(n);
  const int n_seeds = 150;
  std::vector<double> avg(n / 2, 0.0);
  for (int s = 0; s < n_seeds; ++s) {
    const auto phi = synthesize_phase_noise(m, fs, n, 50 + s);
    std::vector<cplx> spec(phi.begin(), phi.end());
    fft(spec);
    for (std::size_t k = 0; k < n / 2; ++k) {
      avg[k] += std::norm(spec[k]) / (fs * static_cast<double>(n));
    }
  }
  int checked = 0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double f = k * df;
    if (f < 1e5 || f > 1e7) continue;
    const double got_db = 10.0 * std::log10(avg[k] / n_seeds);
    REQUIRE(std::abs(got_db - psd_at(m, f)) < 2.0);
    ++checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("apply rotates without changing magnitudes") {
  std::vector<cplx> x = {{1.0, 0.0}, {0.0, 2.0}, {-1.5, 0.5}};
  const std::vector<double> phi = {0.3, -1.2, 2.9, 0.0};
  auto y = x;
  apply_phase_noise(y, phi);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::abs(y[i]) == Catch::Approx(std::abs(x[i])).margin(1e-12));
    CHECK(y[i] == x[i] * cplx(std::cos(phi[i]), std::sin(phi[i])));
  }

  std::vector<cplx> too_long(5, cplx(1.0, 0.0));
  CHECK_THROWS_AS(apply_phase_noise(too_long, phi), std::invalid_argument);
}

TEST_CASE("constant trajectory applies a rigid rotation") {
  std::vector<cplx> x(16, cplx(0.6, -0.8));
  const std::vector<double> phi(16, 0.3);
  apply_phase_noise(x, phi);
  const cplx want = cplx(0.6, -0.8) * cplx(std::cos(0.3), std::sin(0.3));
  for (const auto& v : x) CHECK(std::abs(v - want) < 1e-15);
}
