#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "nrlink/fft.hpp"
#include "nrlink/rng.hpp"

namespace nrlink {

// Oscillator phase-noise PSD as a pole/zero profile around a flat floor:
//   S(f) = psd0 + 10*log10( prod_n (1 + (f/fz_n)^az_n)
//                         / prod_m (1 + (f/fp_m)^ap_m) )   [dBc/Hz]
// Interpreted as a two-sided density, S(-f) = S(f).
struct PhaseNoiseModel {
  std::string name;
  double fc_ghz = 0.0;  // native carrier of the profile, informational
  double psd0_dbc_hz = 0.0;
  std::vector<double> fz_hz;
  std::vector<double> az;
  std::vector<double> fp_hz;
  std::vector<double> ap;

  void validate() const {
    if (fz_hz.size() != az.size() || fp_hz.size() != ap.size()) {
      throw std::invalid_argument("corner/slope count mismatch");
    }
    for (double f : fz_hz) {
      if (!(f > 0.0)) throw std::invalid_argument("zero corner must be positive");
    }
    for (double f : fp_hz) {
      if (!(f > 0.0)) throw std::invalid_argument("pole corner must be positive");
    }
    for (double a : az) {
      if (!(a > 0.0)) throw std::invalid_argument("zero slope must be positive");
    }
    for (double a : ap) {
      if (!(a > 0.0)) throw std::invalid_argument("pole slope must be positive");
    }
  }
};

inline double psd_at(const PhaseNoiseModel& m, double f_offset_hz) {
  const double f = std::abs(f_offset_hz);
  double acc = m.psd0_dbc_hz;
  for (std::size_t i = 0; i < m.fz_hz.size(); ++i) {
    acc += 10.0 * std::log10(1.0 + std::pow(f / m.fz_hz[i], m.az[i]));
  }
  for (std::size_t i = 0; i < m.fp_hz.size(); ++i) {
    acc -= 10.0 * std::log10(1.0 + std::pow(f / m.fp_hz[i], m.ap[i]));
  }
  return acc;
}

inline PhaseNoiseModel pn_model_a() {
  return {"A", 30.0,  -79.4, {1.8e6, 2.2e6, 40e6}, {2.0, 2.0, 2.0},
          {0.1e6, 0.2e6, 8e6}, {2.0, 2.0, 2.0}};
}

inline PhaseNoiseModel pn_model_b() {
  return {"B", 60.0,  -70.0, {0.02e6, 6e6, 10e6}, {2.0, 2.0, 2.0},
          {0.005e6, 0.4e6, 0.6e6}, {2.0, 2.0, 2.0}};
}

inline PhaseNoiseModel pn_model_c() {
  return {"C", 29.55, 32.0,  {0.003e6, 0.55e6, 280e6}, {2.37, 2.7, 2.53},
          {1e6, 1.6e6, 30e6}, {3.3, 3.3, 1.0}};
}

inline PhaseNoiseModel pn_preset(const std::string& name) {
  if (name == "A") return pn_model_a();
  if (name == "B") return pn_model_b();
  if (name == "C") return pn_model_c();
  throw std::invalid_argument("unknown phase noise model: " + name);
}

namespace detail {

inline std::uint64_t hash_doubles(std::uint64_t h, const std::vector<double>& v) {
  for (double d : v) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    h = splitmix64(h ^ bits);
  }
  return h;
}

// Spectral amplitude table sqrt(S(f_k) * df) for k < n/2, cached because the
// campaign re-synthesizes the same (model, rate, length) combination per trial.
inline const std::vector<double>& spectral_amplitudes(const PhaseNoiseModel& m,
                                                      double sample_rate,
                                                      std::size_t n) {
  std::uint64_t key = splitmix64(n);
  key = hash_doubles(key, {sample_rate, m.psd0_dbc_hz});
  key = hash_doubles(key, m.fz_hz);
  key = hash_doubles(key, m.az);
  key = hash_doubles(key, m.fp_hz);
  key = hash_doubles(key, m.ap);

  thread_local std::unordered_map<std::uint64_t, std::vector<double>> cache;
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const double df = sample_rate / static_cast<double>(n);
  std::vector<double> amp(n / 2);
  amp[0] = 0.0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double s_lin = std::pow(10.0, psd_at(m, k * df) / 10.0);
    amp[k] = std::sqrt(s_lin * df);
  }
  return cache.emplace(key, std::move(amp)).first->second;
}

}  // namespace detail

// Draws n real phase samples whose expected periodogram |DFT|^2/(fs*n) equals
// the model PSD bin-for-bin. DC and Nyquist are zeroed, so the trajectory has
// exactly zero mean.
inline std::vector<double> synthesize_phase_noise(const PhaseNoiseModel& m,
                                                  double sample_rate, std::size_t n,
                                                  std::uint64_t seed) {
  m.validate();
  if (n < 256 || n % 2 != 0) {
    throw std::invalid_argument("trajectory length must be even and >= 256");
  }
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample rate must be positive");

  const std::vector<double>& amp = detail::spectral_amplitudes(m, sample_rate, n);
  std::vector<cplx> spec(n, cplx(0.0, 0.0));
  Rng rng(seed);
  for (std::size_t k = 1; k < n / 2; ++k) {
    spec[k] = rng.cnormal() * amp[k];
  }
  for (std::size_t k = 1; k < n / 2; ++k) {
    spec[n - k] = std::conj(spec[k]);
  }
  ifft(spec);
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) phi[i] = spec[i].real();
  return phi;
}

// Rotates each sample by its own phase. The trajectory may be longer than the
// waveform (synthesis pads to a power of two); shorter is an error.
inline void apply_phase_noise(std::vector<cplx>& samples, const std::vector<double>& phi) {
  if (phi.size() < samples.size()) {
    throw std::invalid_argument("phase trajectory shorter than waveform");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] *= cplx(std::cos(phi[i]), std::sin(phi[i]));
  }
}

}  // namespace nrlink
