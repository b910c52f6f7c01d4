#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "nrlink/carrier.hpp"
#include "nrlink/channel.hpp"
#include "nrlink/grid.hpp"
#include "nrlink/metrics.hpp"
#include "nrlink/ofdm.hpp"
#include "nrlink/phase_noise.hpp"
#include "nrlink/qam.hpp"
#include "nrlink/rng.hpp"
#include "nrlink/rx.hpp"

namespace nrlink {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct GenieFlags {
  bool timing = false;
  bool noise_var = false;
};

// One point in the simulation space. snr_db without a value means noise-free.
struct ScenarioConfig {
  std::string pn_model = "none";  // none, A, B, C
  double fc_ghz = 0.0;            // 0 picks the model's native carrier
  std::string modulation = "64qam";
  std::size_t n_tx = 1;
  std::size_t n_rx = 2;
  std::optional<double> snr_db = 10.0;
  bool cpe_compensation = true;
  std::string channel_profile = "flat";
  std::size_t n_frames = 2;
  std::uint64_t master_seed = 1;
  GenieFlags genie;
};

using ProfileMap = std::map<std::string, TdlProfile>;

inline ProfileMap builtin_profiles() {
  return {{"flat", tdl_flat()}, {"tdl3", tdl3()}};
}

inline double resolve_fc_ghz(const ScenarioConfig& s) {
  if (s.fc_ghz != 0.0) return s.fc_ghz;
  if (s.pn_model == "none") return 0.0;
  return pn_preset(s.pn_model).fc_ghz;
}

inline void validate_scenario(const ScenarioConfig& s, const ProfileMap& profiles) {
  try {
    if (s.pn_model != "none") pn_preset(s.pn_model);
    modulation_from_string(s.modulation);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (s.n_tx != 1 && s.n_tx != 2) throw ConfigError("n_tx must be 1 or 2");
  if (s.n_rx != 2 && s.n_rx != 4) throw ConfigError("n_rx must be 2 or 4");
  if (s.n_frames < 1) throw ConfigError("n_frames must be at least 1");
  if (s.fc_ghz < 0.0) throw ConfigError("fc_ghz must be non-negative");
  auto it = profiles.find(s.channel_profile);
  if (it == profiles.end()) {
    throw ConfigError("unknown channel profile: " + s.channel_profile);
  }
  try {
    it->second.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

// Stream seeds are derived from (master, trial, purpose) so that arms of a
// comparison share randomness: neither the phase-noise model choice nor the
// compensation switch enters the derivation.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                                 std::string_view purpose) {
  constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;
  return splitmix64(splitmix64(master ^ golden * (trial + 1)) ^ fnv1a64(purpose));
}

struct LinkDiagnostics {
  std::size_t timing_offset = 0;
  std::vector<std::vector<double>> cpe_phi;  // [slot][symbol]
  std::vector<cplx> eq_symbols;              // data REs over all slots
  std::vector<cplx> ref_symbols;
};

// Runs one complete drop: payload, grid, waveform, oscillator, channel,
// noise, receiver, metrics.
inline LinkMetrics run_link(const ScenarioConfig& s, const ProfileMap& profiles,
                            std::size_t trial, LinkDiagnostics* diag = nullptr) {
  validate_scenario(s, profiles);
  const CarrierConfig cc = nr_60khz_66rb();
  PdschConfig pc;
  pc.modulation = modulation_from_string(s.modulation);
  pc.dmrs_seed = derive_seed(s.master_seed, trial, "pilot-dmrs");
  pc.ptrs_seed = derive_seed(s.master_seed, trial, "pilot-ptrs");

  const std::size_t n_slots = s.n_frames * cc.slots_per_frame();
  const std::size_t bps = static_cast<std::size_t>(bits_per_symbol(pc.modulation));
  const std::size_t block_bits = n_data_re(cc, pc) * bps;

  Rng payload_rng(derive_seed(s.master_seed, trial, "payload"));
  std::vector<BitBlock> blocks;
  std::vector<ResourceGrid> grids;
  blocks.reserve(n_slots);
  grids.reserve(n_slots);
  for (std::size_t slot = 0; slot < n_slots; ++slot) {
    blocks.push_back(make_block(block_bits, payload_rng));
    grids.push_back(build_slot_grid(cc, pc, slot, blocks.back()));
  }
  std::vector<cplx> wave = ofdm_modulate(cc, grids, 0);

  std::vector<std::vector<cplx>> tx;
  if (s.n_tx == 1) {
    tx.push_back(std::move(wave));
  } else {
    // both ports radiate the same waveform at half power, one oscillator
    for (auto& v : wave) v *= kInvSqrt2;
    tx.push_back(wave);
    tx.push_back(std::move(wave));
  }

  if (s.pn_model != "none") {
    const PhaseNoiseModel model = pn_preset(s.pn_model);
    const std::size_t n_traj = next_pow2(std::max<std::size_t>(tx[0].size(), 256));
    const std::vector<double> phi = synthesize_phase_noise(
        model, cc.sample_rate(), n_traj, derive_seed(s.master_seed, trial, "phase-noise"));
    for (auto& stream : tx) apply_phase_noise(stream, phi);
  }

  Rng fade_rng(derive_seed(s.master_seed, trial, "fading"));
  const ChannelRealization ch =
      tdl_realize(profiles.at(s.channel_profile), cc.sample_rate(), s.n_tx, s.n_rx, fade_rng);
  std::vector<std::vector<cplx>> rx = apply_channel(ch, tx);

  Rng awgn_rng(derive_seed(s.master_seed, trial, "awgn"));
  const double noise_var = add_awgn(rx, s.snr_db, awgn_rng);

  RecoverConfig rc;
  rc.cpe_compensation = s.cpe_compensation;
  rc.genie_timing = s.genie.timing;
  rc.genie_noise_var = s.genie.noise_var;
  rc.true_noise_var = noise_var;
  const RecoverResult rec = recover_pdsch(cc, pc, rx, n_slots, rc);

  const std::vector<Role> roles = slot_roles(cc, pc);
  std::vector<cplx> eq_all, ref_all;
  std::vector<std::uint8_t> bits_got, bits_want;
  eq_all.reserve(n_slots * block_bits / bps);
  ref_all.reserve(n_slots * block_bits / bps);
  std::size_t failed = 0;
  for (std::size_t slot = 0; slot < n_slots; ++slot) {
    const SlotResult& sr = rec.slots[slot];
    eq_all.insert(eq_all.end(), sr.eq_symbols.begin(), sr.eq_symbols.end());
    const std::vector<cplx> ref = extract_data(grids[slot], roles);
    ref_all.insert(ref_all.end(), ref.begin(), ref.end());
    bits_got.insert(bits_got.end(), sr.bits.begin(), sr.bits.end());
    bits_want.insert(bits_want.end(), blocks[slot].bits.begin(), blocks[slot].bits.end());
    if (!sr.crc_ok) ++failed;
  }

  LinkMetrics m;
  m.evm_pct = evm_pct(eq_all, ref_all);
  m.evm_db = evm_db_from_pct(m.evm_pct);
  m.ber = bit_error_rate(bits_got, bits_want);
  m.bler = static_cast<double>(failed) / static_cast<double>(n_slots);
  m.n_bits = bits_got.size();
  m.n_blocks = n_slots;

  if (diag != nullptr) {
    diag->timing_offset = rec.timing_offset;
    diag->cpe_phi.clear();
    for (const auto& sr : rec.slots) diag->cpe_phi.push_back(sr.cpe_phi);
    diag->eq_symbols = std::move(eq_all);
    diag->ref_symbols = std::move(ref_all);
  }
  return m;
}

// Axis lists for a sweep. Empty axes inherit the base scenario's value; the
// SNR axis defaults to -5..20 dB in 2.5 dB steps.
struct SweepConfig {
  ScenarioConfig base;
  std::vector<std::string> pn_models;
  std::vector<std::string> modulations;
  std::vector<std::size_t> n_tx_axis;
  std::vector<std::size_t> n_rx_axis;
  std::vector<std::string> channel_axis;
  std::vector<std::optional<double>> snr_axis = default_snr_axis();
  std::vector<bool> cpe_axis;
  std::size_t n_seeds = 1;
  std::uint64_t master_seed = 1;

  static std::vector<std::optional<double>> default_snr_axis() {
    std::vector<std::optional<double>> v;
    for (double snr = -5.0; snr <= 20.0 + 1e-9; snr += 2.5) v.push_back(snr);
    return v;
  }
};

struct SweepRow {
  std::size_t scenario_id = 0;
  ScenarioConfig scenario;
  std::size_t trial = 0;
  LinkMetrics metrics;
  bool ok = false;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> errors;
};

inline std::size_t sweep_row_count(const SweepConfig& cfg) {
  auto dim = [](std::size_t n) { return n == 0 ? std::size_t{1} : n; };
  return dim(cfg.pn_models.size()) * dim(cfg.modulations.size()) *
         dim(cfg.n_tx_axis.size()) * dim(cfg.n_rx_axis.size()) *
         dim(cfg.channel_axis.size()) * dim(cfg.snr_axis.size()) *
         dim(cfg.cpe_axis.size()) * std::max<std::size_t>(cfg.n_seeds, 1);
}

// Expands the axis product in a fixed nesting order (model, modulation, tx,
// rx, channel, snr, compensation, seed) and runs every row. Rows keep their
// enumeration order regardless of n_jobs.
inline SweepResult run_sweep(const SweepConfig& cfg, const ProfileMap& profiles,
                             std::size_t n_jobs = 1) {
  if (cfg.n_seeds < 1) throw ConfigError("seeds must be at least 1");
  if (sweep_row_count(cfg) > 100000) {
    throw ConfigError("sweep exceeds 100000 rows");
  }
  auto axis_or = [](const std::vector<std::string>& v, const std::string& base) {
    return v.empty() ? std::vector<std::string>{base} : v;
  };
  const std::vector<std::string> pns = axis_or(cfg.pn_models, cfg.base.pn_model);
  const std::vector<std::string> mods = axis_or(cfg.modulations, cfg.base.modulation);
  const std::vector<std::size_t> txs =
      cfg.n_tx_axis.empty() ? std::vector<std::size_t>{cfg.base.n_tx} : cfg.n_tx_axis;
  const std::vector<std::size_t> rxs =
      cfg.n_rx_axis.empty() ? std::vector<std::size_t>{cfg.base.n_rx} : cfg.n_rx_axis;
  const std::vector<std::string> chans = axis_or(cfg.channel_axis, cfg.base.channel_profile);
  const std::vector<std::optional<double>> snrs =
      cfg.snr_axis.empty() ? std::vector<std::optional<double>>{cfg.base.snr_db}
                           : cfg.snr_axis;
  const std::vector<bool> cpes =
      cfg.cpe_axis.empty() ? std::vector<bool>{cfg.base.cpe_compensation} : cfg.cpe_axis;

  SweepResult result;
  std::size_t scenario_id = 0;
  for (const auto& pn : pns) {
    for (const auto& mod : mods) {
      for (std::size_t ntx : txs) {
        for (std::size_t nrx : rxs) {
          for (const auto& chan : chans) {
            for (const auto& snr : snrs) {
              for (bool cpe : cpes) {
                ScenarioConfig s = cfg.base;
                s.pn_model = pn;
                s.modulation = mod;
                s.n_tx = ntx;
                s.n_rx = nrx;
                s.channel_profile = chan;
                s.snr_db = snr;
                s.cpe_compensation = cpe;
                s.master_seed = cfg.master_seed;
                validate_scenario(s, profiles);
                for (std::size_t t = 0; t < cfg.n_seeds; ++t) {
                  SweepRow row;
                  row.scenario_id = scenario_id;
                  row.scenario = s;
                  row.trial = t;
                  result.rows.push_back(std::move(row));
                }
                ++scenario_id;
              }
            }
          }
        }
      }
    }
  }

  auto work = [&](SweepRow& row) {
    try {
      row.metrics = run_link(row.scenario, profiles, row.trial);
      row.ok = true;
    } catch (const std::exception& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.metrics = LinkMetrics{nan, nan, nan, nan, 0, 0};
      row.ok = false;
      row.error = e.what();
    }
  };

  if (n_jobs <= 1) {
    for (auto& row : result.rows) work(row);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t n_threads = std::min(n_jobs, result.rows.size());
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t idx = next.fetch_add(1);
          if (idx >= result.rows.size()) return;
          work(result.rows[idx]);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    if (!result.rows[i].ok) {
      result.errors.push_back("row " + std::to_string(i) + ": " + result.rows[i].error);
    }
  }
  return result;
}

}  // namespace nrlink
