#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrlink/fft.hpp"
#include "nrlink/rng.hpp"

namespace nrlink {

// Tapped delay line with per-tap Rayleigh gains, static over a drop.
struct TdlProfile {
  std::string name;
  std::vector<double> delays_ns;
  std::vector<double> powers_db;  // relative, normalized to unit total at realization
  double doppler_hz = 0.0;        // only 0 is supported

  void validate() const {
    if (delays_ns.empty() || delays_ns.size() != powers_db.size()) {
      throw std::invalid_argument("profile needs matching delay and power lists");
    }
    for (double d : delays_ns) {
      if (d < 0.0) throw std::invalid_argument("negative tap delay");
    }
    if (doppler_hz != 0.0) {
      throw std::invalid_argument("only static channels are supported");
    }
  }
};

inline TdlProfile tdl_flat() { return {"flat", {0.0}, {0.0}, 0.0}; }

inline TdlProfile tdl3() {
  return {"tdl3", {0.0, 50.0, 120.0}, {0.0, -3.0, -6.0}, 0.0};
}

struct ChannelRealization {
  std::size_t n_tx = 1, n_rx = 1;
  std::vector<std::size_t> delays;  // samples
  std::vector<cplx> gains;          // [tap][tx][rx] flattened

  const cplx& gain(std::size_t tap, std::size_t tx, std::size_t rx) const {
    return gains[(tap * n_tx + tx) * n_rx + rx];
  }
};

// Draws i.i.d. complex gaussian tap gains scaled so the expected total power
// over taps is one per tx/rx pair. Draw order: tap, then tx, then rx.
inline ChannelRealization tdl_realize(const TdlProfile& p, double sample_rate,
                                      std::size_t n_tx, std::size_t n_rx, Rng& rng) {
  p.validate();
  if (n_tx == 0 || n_rx == 0) throw std::invalid_argument("need antennas");

  const std::size_t n_taps = p.delays_ns.size();
  std::vector<double> pw(n_taps);
  double total = 0.0;
  for (std::size_t t = 0; t < n_taps; ++t) {
    pw[t] = std::pow(10.0, p.powers_db[t] / 10.0);
    total += pw[t];
  }
  ChannelRealization ch;
  ch.n_tx = n_tx;
  ch.n_rx = n_rx;
  ch.delays.resize(n_taps);
  ch.gains.resize(n_taps * n_tx * n_rx);
  for (std::size_t t = 0; t < n_taps; ++t) {
    ch.delays[t] =
        static_cast<std::size_t>(std::llround(p.delays_ns[t] * 1e-9 * sample_rate));
    const double amp = std::sqrt(pw[t] / total);
    for (std::size_t tx = 0; tx < n_tx; ++tx) {
      for (std::size_t rx = 0; rx < n_rx; ++rx) {
        ch.gains[(t * n_tx + tx) * n_rx + rx] = amp * rng.cnormal();
      }
    }
  }
  return ch;
}

// y_rx[i] = sum over taps and tx ports of gain * x_tx[i - delay].
inline std::vector<std::vector<cplx>> apply_channel(
    const ChannelRealization& ch, const std::vector<std::vector<cplx>>& tx) {
  if (tx.size() != ch.n_tx) throw std::invalid_argument("tx port count mismatch");
  const std::size_t len = tx.empty() ? 0 : tx[0].size();
  for (const auto& s : tx) {
    if (s.size() != len) throw std::invalid_argument("tx streams differ in length");
  }
  std::vector<std::vector<cplx>> rx(ch.n_rx, std::vector<cplx>(len, cplx(0.0, 0.0)));
  for (std::size_t t = 0; t < ch.delays.size(); ++t) {
    const std::size_t d = ch.delays[t];
    if (d >= len) continue;
    for (std::size_t p = 0; p < ch.n_tx; ++p) {
      for (std::size_t q = 0; q < ch.n_rx; ++q) {
        const cplx g = ch.gain(t, p, q);
        const cplx* src = tx[p].data();
        cplx* dst = rx[q].data();
        for (std::size_t i = d; i < len; ++i) dst[i] += g * src[i - d];
      }
    }
  }
  return rx;
}

// Adds white gaussian noise at the requested SNR relative to the pooled mean
// received power across antennas. Returns the per-antenna complex noise
// variance actually used; no value means no noise at all (returns 0).
inline double add_awgn(std::vector<std::vector<cplx>>& rx, std::optional<double> snr_db,
                       Rng& rng) {
  if (!snr_db.has_value()) return 0.0;
  double ref = 0.0;
  std::size_t count = 0;
  for (const auto& ant : rx) {
    for (const auto& v : ant) ref += std::norm(v);
    count += ant.size();
  }
  if (count == 0 || ref <= 0.0) {
    throw std::invalid_argument("cannot scale noise to a silent signal");
  }
  ref /= static_cast<double>(count);
  const double noise_var = ref * std::pow(10.0, -snr_db.value() / 10.0);
  const double amp = std::sqrt(noise_var);
  for (auto& ant : rx) {
    for (auto& v : ant) v += amp * rng.cnormal();
  }
  return noise_var;
}

}  // namespace nrlink
