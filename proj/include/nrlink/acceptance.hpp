#pragma once

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "nrlink/campaign.hpp"
#include "nrlink/sweep_io.hpp"

namespace nrlink {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
};

inline constexpr int kNumCriteria = 12;

namespace detail {

inline std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

// Shared monte-carlo setup for the ordering checks.
inline ScenarioConfig ordering_scenario() {
  ScenarioConfig s;
  s.pn_model = "A";
  s.snr_db = 20.0;
  s.n_frames = 1;
  s.master_seed = 2026;
  return s;
}

struct PairedMeans {
  double evm_on = 0.0, evm_off = 0.0;
  double ber_on = 0.0, ber_off = 0.0;
};

inline PairedMeans paired_compensation_runs(const std::string& modulation,
                                            std::size_t n_trials) {
  const ProfileMap profiles = builtin_profiles();
  ScenarioConfig s = ordering_scenario();
  s.modulation = modulation;
  PairedMeans m;
  for (std::size_t t = 0; t < n_trials; ++t) {
    s.cpe_compensation = true;
    const LinkMetrics on = run_link(s, profiles, t);
    s.cpe_compensation = false;
    const LinkMetrics off = run_link(s, profiles, t);
    m.evm_on += on.evm_pct;
    m.evm_off += off.evm_pct;
    m.ber_on += on.ber;
    m.ber_off += off.ber;
  }
  const double n = static_cast<double>(n_trials);
  m.evm_on /= n;
  m.evm_off /= n;
  m.ber_on /= n;
  m.ber_off /= n;
  return m;
}

}  // namespace detail

// 1: analytic psd hits its dc value exactly and settles at the closed-form tail
inline CriterionResult criterion_psd_anchors() {
  CriterionResult r{1, "psd anchors at dc and in the far tail", false, ""};
  const PhaseNoiseModel a = pn_model_a(), b = pn_model_b(), c = pn_model_c();
  const bool dc_ok = psd_at(a, 0.0) == -79.4 && psd_at(b, 0.0) == -70.0 &&
                     psd_at(c, 0.0) == 32.0;
  const double tail = psd_at(a, 1e12);
  const bool tail_ok = std::abs(tail - (-139.3)) <= 0.1;
  r.pass = dc_ok && tail_ok;
  r.detail = detail::strf("dc %s, tail %.4f dBc/Hz vs -139.3 +/- 0.1",
                          dc_ok ? "exact" : "WRONG", tail);
  return r;
}

// 2: averaged periodogram of synthesized trajectories tracks the analytic curve
inline CriterionResult criterion_spectrum_fidelity() {
  CriterionResult r{2, "synthesized spectrum tracks the analytic psd", false, ""};
  const PhaseNoiseModel m = pn_model_a();
  const double fs = 61.44e6;
  const std::size_t n = std::size_t{1} << 16;
  const std::size_t n_avg = 200;
  std::vector<double> mean(n / 2, 0.0);
  std::vector<cplx> x(n);
  for (std::size_t seed = 0; seed < n_avg; ++seed) {
    const std::vector<double> phi = synthesize_phase_noise(m, fs, n, 9000 + seed);
    for (std::size_t i = 0; i < n; ++i) x[i] = phi[i];
    fft(x);
    for (std::size_t k = 1; k < n / 2; ++k) {
      mean[k] += std::norm(x[k]) / (fs * static_cast<double>(n));
    }
  }
  double max_dev = 0.0;
  std::size_t n_bins = 0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    if (f < 1e4 || f > 1e7) continue;
    const double est_db = 10.0 * std::log10(mean[k] / static_cast<double>(n_avg));
    max_dev = std::max(max_dev, std::abs(est_db - psd_at(m, f)));
    ++n_bins;
  }
  r.pass = max_dev <= 2.0;
  r.detail = detail::strf("max deviation %.3f dB over %zu bins, limit 2.0", max_dev, n_bins);
  return r;
}

// 3: no oscillator, no noise, flat channel: the chain must be exact
inline CriterionResult criterion_transparent_chain() {
  CriterionResult r{3, "transparent chain is error free", false, ""};
  const ProfileMap profiles = builtin_profiles();
  ScenarioConfig s;
  s.n_frames = 1;
  s.snr_db.reset();
  bool ok = true;
  double worst_evm = 0.0;
  for (const char* mod : {"64qam", "256qam"}) {
    s.modulation = mod;
    const LinkMetrics m = run_link(s, profiles, 0);
    ok = ok && m.ber == 0.0 && m.bler == 0.0 && m.evm_pct < 1e-8;
    worst_evm = std::max(worst_evm, m.evm_pct);
  }
  r.pass = ok;
  r.detail = detail::strf("ber 0, bler 0 both modulations, worst evm %.2e %%", worst_evm);
  return r;
}

// 4: percent and db give the same number, on anchors and on emitted rows
inline CriterionResult criterion_evm_consistency() {
  CriterionResult r{4, "evm percent and db stay consistent", false, ""};
  Rng rng(123);
  double max_rt = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double pct = std::pow(10.0, -3.0 + 5.0 * rng.uniform());
    const double db = evm_db_from_pct(pct);
    max_rt = std::max(max_rt, std::abs(evm_pct_from_db(db) - pct));
    max_rt = std::max(max_rt, std::abs(db - 20.0 * std::log10(pct / 100.0)));
  }
  const double anchor = evm_db_from_pct(7.4);
  const bool anchor_ok = std::abs(anchor - (-22.6)) <= 0.05;

  SweepConfig cfg;
  cfg.base.n_frames = 1;
  cfg.snr_axis = {0.0, 10.0};
  const SweepResult sr = run_sweep(cfg, builtin_profiles(), 1);
  double max_row = 0.0;
  for (const auto& row : sr.rows) {
    max_row = std::max(max_row, std::abs(row.metrics.evm_db -
                                         20.0 * std::log10(row.metrics.evm_pct / 100.0)));
  }
  r.pass = max_rt <= 1e-9 && anchor_ok && max_row <= 1e-9;
  r.detail = detail::strf("roundtrip %.1e, rows %.1e (limit 1e-9), 7.4%% -> %.3f dB",
                          max_rt, max_row, anchor);
  return r;
}

// 5: a constant injected rotation comes back exactly under genie conditions
inline CriterionResult criterion_cpe_exactness() {
  CriterionResult r{5, "cpe estimator recovers a known rotation", false, ""};
  const CarrierConfig cc = nr_60khz_66rb();
  PdschConfig pc;
  pc.modulation = Modulation::kQam64;
  Rng rng(77);
  const BitBlock blk = make_block(n_data_re(cc, pc) * 6, rng);
  ResourceGrid g = build_slot_grid(cc, pc, 0, blk);
  const cplx rot = std::polar(1.0, 0.3);
  for (auto& v : g.re) v *= rot;
  const std::vector<ResourceGrid> rx{g};
  ChannelEstimate est;
  est.h.assign(1, std::vector<cplx>(cc.n_subcarriers(), cplx{1.0, 0.0}));
  est.noise_var = 0.0;
  const CpeEstimate cpe = estimate_cpe(cc, pc, 0, rx, est);
  double max_err = 0.0;
  for (double phi : cpe.phi) max_err = std::max(max_err, std::abs(phi - 0.3));
  r.pass = max_err <= 1e-9;
  r.detail = detail::strf("max per-symbol error %.2e rad, limit 1e-9", max_err);
  return r;
}

// 6: equalizer equals zero-forcing at zero noise and the scalar closed form
inline CriterionResult criterion_equalizer_forms() {
  CriterionResult r{6, "equalizer matches its closed forms", false, ""};
  Rng rng(55);
  double max_zf = 0.0;
  for (int i = 0; i < 1000; ++i) {
    cplx h[2] = {rng.cnormal(), rng.cnormal()};
    if (std::norm(h[0]) + std::norm(h[1]) < 1e-6) {
      h[0] = 1.0;
    }
    const cplx s = rng.cnormal();
    const cplx y[2] = {h[0] * s, h[1] * s};
    max_zf = std::max(max_zf, std::abs(equalize_mmse(y, h, 2, 0.0) - s));
  }
  double max_sh = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const cplx h = rng.cnormal();
    const cplx y = rng.cnormal();
    const double s2 = rng.uniform() + 0.01;
    const cplx want = std::conj(h) * y / (std::norm(h) + s2);
    max_sh = std::max(max_sh, std::abs(equalize_mmse(&y, &h, 1, s2) - want));
  }
  r.pass = max_zf <= 1e-10 && max_sh <= 1e-12;
  r.detail = detail::strf("zf gap %.1e (limit 1e-10), shrinkage gap %.1e (limit 1e-12)",
                          max_zf, max_sh);
  return r;
}

// 7: compensation must lower mean evm for both modulations, by >= 15% at 64qam
inline CriterionResult criterion_compensation_evm() {
  CriterionResult r{7, "compensation lowers evm", false, ""};
  const detail::PairedMeans m64 = detail::paired_compensation_runs("64qam", 20);
  const detail::PairedMeans m256 = detail::paired_compensation_runs("256qam", 20);
  const bool dir = m64.evm_on < m64.evm_off && m256.evm_on < m256.evm_off;
  const double improvement = (m64.evm_off - m64.evm_on) / m64.evm_off;
  r.pass = dir && improvement >= 0.15;
  r.detail = detail::strf(
      "64qam %.3f%% -> %.3f%%, 256qam %.3f%% -> %.3f%%, improvement %.1f%% vs >= 15%%",
      m64.evm_off, m64.evm_on, m256.evm_off, m256.evm_on, 100.0 * improvement);
  return r;
}

// 8: compensation must lower mean ber at 64qam
inline CriterionResult criterion_compensation_ber() {
  CriterionResult r{8, "compensation lowers ber", false, ""};
  const detail::PairedMeans m = detail::paired_compensation_runs("64qam", 20);
  r.pass = m.ber_on < m.ber_off;
  r.detail = detail::strf("mean ber %.4e with, %.4e without", m.ber_on, m.ber_off);
  return r;
}

// 9: block error ordering between the built-in oscillator presets at 10 dB
inline CriterionResult criterion_model_ordering() {
  CriterionResult r{9, "block error ordering between oscillator models", false, ""};
  const ProfileMap profiles = builtin_profiles();
  ScenarioConfig s;
  s.snr_db = 10.0;
  s.n_frames = 1;
  s.master_seed = 2026;
  double bler_b = 0.0, bler_c = 0.0;
  for (std::size_t t = 0; t < 50; ++t) {
    s.pn_model = "B";
    bler_b += run_link(s, profiles, t).bler;
    s.pn_model = "C";
    bler_c += run_link(s, profiles, t).bler;
  }
  bler_b /= 50.0;
  bler_c /= 50.0;
  r.pass = bler_c <= bler_b;
  r.detail = detail::strf("bler C %.4f vs B %.4f over 50 paired seeds", bler_c, bler_b);
  return r;
}

// 10: mean evm must fall strictly as snr rises
inline CriterionResult criterion_snr_monotonic() {
  CriterionResult r{10, "evm falls as snr rises", false, ""};
  const ProfileMap profiles = builtin_profiles();
  ScenarioConfig s;
  s.pn_model = "A";
  s.n_frames = 1;
  s.master_seed = 2026;
  const double snrs[] = {0.0, 5.0, 10.0, 15.0, 20.0};
  double means[5] = {};
  for (int i = 0; i < 5; ++i) {
    s.snr_db = snrs[i];
    for (std::size_t t = 0; t < 20; ++t) means[i] += run_link(s, profiles, t).evm_pct;
    means[i] /= 20.0;
  }
  bool monotone = true;
  for (int i = 1; i < 5; ++i) monotone = monotone && means[i] < means[i - 1];
  r.pass = monotone;
  r.detail = detail::strf("mean evm %% = {%.2f, %.2f, %.2f, %.2f, %.2f} at {0,5,10,15,20} dB",
                          means[0], means[1], means[2], means[3], means[4]);
  return r;
}

// 11: more receive antennas must strictly lower block errors at 10 dB
inline CriterionResult criterion_antenna_diversity() {
  CriterionResult r{11, "extra receive antennas lower block errors", false, ""};
  const ProfileMap profiles = builtin_profiles();
  ScenarioConfig s;
  s.pn_model = "A";
  s.snr_db = 10.0;
  s.n_frames = 1;
  s.master_seed = 2026;
  double bler2 = 0.0, bler4 = 0.0;
  for (std::size_t t = 0; t < 25; ++t) {
    s.n_rx = 2;
    bler2 += run_link(s, profiles, t).bler;
    s.n_rx = 4;
    bler4 += run_link(s, profiles, t).bler;
  }
  bler2 /= 25.0;
  bler4 /= 25.0;
  r.pass = bler4 < bler2;
  r.detail = detail::strf("bler %.4f with 4 antennas vs %.4f with 2, over 25 paired seeds",
                          bler4, bler2);
  return r;
}

// 12: the same sweep config must produce byte-identical csv, any thread count
inline CriterionResult criterion_sweep_determinism() {
  CriterionResult r{12, "sweep output is deterministic", false, ""};
  SweepConfig cfg;
  cfg.base.n_frames = 1;
  cfg.master_seed = 5;
  cfg.pn_models = {"A"};
  cfg.snr_axis = {0.0, 10.0};
  cfg.cpe_axis = {true, false};
  cfg.n_seeds = 2;
  const ProfileMap profiles = builtin_profiles();
  const std::string first = sweep_csv(run_sweep(cfg, profiles, 1));
  const std::string second = sweep_csv(run_sweep(cfg, profiles, 2));
  r.pass = first == second && !first.empty();
  r.detail = detail::strf("%zu-row sweep twice (serial, then 2 threads): %s",
                          sweep_row_count(cfg), r.pass ? "identical" : "DIFFERS");
  return r;
}

inline CriterionResult run_criterion(int id) {
  switch (id) {
    case 1: return criterion_psd_anchors();
    case 2: return criterion_spectrum_fidelity();
    case 3: return criterion_transparent_chain();
    case 4: return criterion_evm_consistency();
    case 5: return criterion_cpe_exactness();
    case 6: return criterion_equalizer_forms();
    case 7: return criterion_compensation_evm();
    case 8: return criterion_compensation_ber();
    case 9: return criterion_model_ordering();
    case 10: return criterion_snr_monotonic();
    case 11: return criterion_antenna_diversity();
    case 12: return criterion_sweep_determinism();
    default: throw std::invalid_argument("criterion id must be 1..12");
  }
}

// Runs the checklist (or a single criterion when only != 0), one line each.
// Returns true when every executed criterion passed.
inline bool run_checklist(int only, std::FILE* out) {
  bool all_ok = true;
  for (int id = 1; id <= kNumCriteria; ++id) {
    if (only != 0 && id != only) continue;
    CriterionResult r;
    try {
      r = run_criterion(id);
    } catch (const std::exception& e) {
      r.id = id;
      r.title = "criterion threw";
      r.pass = false;
      r.detail = e.what();
    }
    std::fprintf(out, "[%s] criterion %2d: %s (%s)\n", r.pass ? "PASS" : "FAIL", r.id,
                 r.title.c_str(), r.detail.c_str());
    std::fflush(out);
    all_ok = all_ok && r.pass;
  }
  return all_ok;
}

}  // namespace nrlink
