#pragma once

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "nrlink/campaign.hpp"
#include "nrlink/version.hpp"

namespace nrlink {

inline const char* kSweepCsvHeader =
    "scenario_id,pn_model,fc_ghz,modulation,n_tx,n_rx,snr_db,cpe_comp,seed,"
    "evm_pct,evm_db,ber,bler,n_bits,n_blocks";

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline std::string fmt_snr(const std::optional<double>& snr) {
  return snr.has_value() ? fmt_double(snr.value()) : std::string("no-noise");
}

}  // namespace detail

// One line per row in enumeration order. Content depends only on the sweep
// configuration and seeds, never on wall time or thread count.
inline std::string sweep_csv(const SweepResult& result) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  for (const SweepRow& r : result.rows) {
    out += std::to_string(r.scenario_id);
    out += ',';
    out += r.scenario.pn_model;
    out += ',';
    out += detail::fmt_double(resolve_fc_ghz(r.scenario));
    out += ',';
    out += r.scenario.modulation;
    out += ',';
    out += std::to_string(r.scenario.n_tx);
    out += ',';
    out += std::to_string(r.scenario.n_rx);
    out += ',';
    out += detail::fmt_snr(r.scenario.snr_db);
    out += ',';
    out += r.scenario.cpe_compensation ? "on" : "off";
    out += ',';
    out += std::to_string(r.trial);
    out += ',';
    out += detail::fmt_double(r.metrics.evm_pct);
    out += ',';
    out += detail::fmt_double(r.metrics.evm_db);
    out += ',';
    out += detail::fmt_double(r.metrics.ber);
    out += ',';
    out += detail::fmt_double(r.metrics.bler);
    out += ',';
    out += std::to_string(r.metrics.n_bits);
    out += ',';
    out += std::to_string(r.metrics.n_blocks);
    out += '\n';
  }
  return out;
}

// ---- configuration files ----------------------------------------------------

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j,
                                const std::vector<std::string>& known,
                                const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const auto& k : known) {
      if (item.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("unknown key in " + where + ": " + item.key());
  }
}

inline std::optional<double> parse_snr(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) {
    if (j.get<std::string>() == "no-noise") return std::nullopt;
    throw ConfigError("snr_db must be a number or \"no-noise\"");
  }
  if (j.is_number()) return j.get<double>();
  throw ConfigError("snr_db must be a number or \"no-noise\"");
}

}  // namespace detail

inline ScenarioConfig parse_scenario_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("scenario must be an object");
  detail::reject_unknown_keys(
      j,
      {"pn_model", "fc_ghz", "modulation", "n_tx", "n_rx", "snr_db",
       "cpe_compensation", "channel_profile", "n_frames", "master_seed", "genie"},
      "scenario");
  ScenarioConfig s;
  try {
    if (j.contains("pn_model")) s.pn_model = j.at("pn_model").get<std::string>();
    if (j.contains("fc_ghz")) s.fc_ghz = j.at("fc_ghz").get<double>();
    if (j.contains("modulation")) s.modulation = j.at("modulation").get<std::string>();
    if (j.contains("n_tx")) s.n_tx = j.at("n_tx").get<std::size_t>();
    if (j.contains("n_rx")) s.n_rx = j.at("n_rx").get<std::size_t>();
    if (j.contains("snr_db")) s.snr_db = detail::parse_snr(j.at("snr_db"));
    if (j.contains("cpe_compensation")) {
      s.cpe_compensation = j.at("cpe_compensation").get<bool>();
    }
    if (j.contains("channel_profile")) {
      s.channel_profile = j.at("channel_profile").get<std::string>();
    }
    if (j.contains("n_frames")) s.n_frames = j.at("n_frames").get<std::size_t>();
    if (j.contains("master_seed")) s.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("genie")) {
      const auto& g = j.at("genie");
      detail::reject_unknown_keys(g, {"timing", "noise_var"}, "genie");
      if (g.contains("timing")) s.genie.timing = g.at("timing").get<bool>();
      if (g.contains("noise_var")) s.genie.noise_var = g.at("noise_var").get<bool>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad scenario value: ") + e.what());
  }
  return s;
}

inline SweepConfig parse_sweep_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("sweep must be an object");
  detail::reject_unknown_keys(j, {"base", "axes", "seeds", "master_seed"}, "sweep");
  SweepConfig cfg;
  try {
    if (j.contains("base")) cfg.base = parse_scenario_json(j.at("base"));
    cfg.master_seed = cfg.base.master_seed;
    if (j.contains("axes")) {
      const auto& a = j.at("axes");
      detail::reject_unknown_keys(a,
                                  {"pn_model", "modulation", "n_tx", "n_rx",
                                   "channel_profile", "snr_db", "cpe_compensation"},
                                  "axes");
      if (a.contains("pn_model")) {
        cfg.pn_models = a.at("pn_model").get<std::vector<std::string>>();
      }
      if (a.contains("modulation")) {
        cfg.modulations = a.at("modulation").get<std::vector<std::string>>();
      }
      if (a.contains("n_tx")) {
        cfg.n_tx_axis = a.at("n_tx").get<std::vector<std::size_t>>();
      }
      if (a.contains("n_rx")) {
        cfg.n_rx_axis = a.at("n_rx").get<std::vector<std::size_t>>();
      }
      if (a.contains("channel_profile")) {
        cfg.channel_axis = a.at("channel_profile").get<std::vector<std::string>>();
      }
      if (a.contains("snr_db")) {
        cfg.snr_axis.clear();
        for (const auto& v : a.at("snr_db")) cfg.snr_axis.push_back(detail::parse_snr(v));
      }
      if (a.contains("cpe_compensation")) {
        cfg.cpe_axis = a.at("cpe_compensation").get<std::vector<bool>>();
      }
    }
    if (j.contains("seeds")) cfg.n_seeds = j.at("seeds").get<std::size_t>();
    if (j.contains("master_seed")) {
      cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad sweep value: ") + e.what());
  }
  return cfg;
}

struct SimConfig {
  std::optional<ScenarioConfig> scenario;
  std::optional<SweepConfig> sweep;
  ProfileMap profiles = builtin_profiles();
};

inline SimConfig parse_config_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  detail::reject_unknown_keys(j, {"scenario", "sweep", "channel_profiles"}, "config");
  SimConfig cfg;
  if (j.contains("channel_profiles")) {
    const auto& cp = j.at("channel_profiles");
    if (!cp.is_object()) throw ConfigError("channel_profiles must be an object");
    for (const auto& item : cp.items()) {
      if (cfg.profiles.count(item.key())) {
        throw ConfigError("channel profile name collides with a builtin: " + item.key());
      }
      const auto& p = item.value();
      detail::reject_unknown_keys(p, {"delays_ns", "powers_db", "doppler_hz"},
                                  "channel_profiles." + item.key());
      TdlProfile prof;
      prof.name = item.key();
      try {
        prof.delays_ns = p.at("delays_ns").get<std::vector<double>>();
        prof.powers_db = p.at("powers_db").get<std::vector<double>>();
        if (p.contains("doppler_hz")) prof.doppler_hz = p.at("doppler_hz").get<double>();
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad channel profile: ") + e.what());
      }
      cfg.profiles.emplace(item.key(), std::move(prof));
    }
  }
  if (j.contains("scenario")) cfg.scenario = parse_scenario_json(j.at("scenario"));
  if (j.contains("sweep")) cfg.sweep = parse_sweep_json(j.at("sweep"));
  return cfg;
}

inline SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid json: ") + e.what());
  }
  return parse_config_json(j);
}

// key=value overrides applied on top of a loaded scenario.
inline void apply_override(ScenarioConfig& s, const std::string& key,
                           const std::string& value) {
  auto parse_bool = [&](const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ConfigError("bad boolean override value: " + v);
  };
  auto parse_u64 = [&](const std::string& v) {
    try {
      return static_cast<std::uint64_t>(std::stoull(v));
    } catch (const std::exception&) {
      throw ConfigError("bad integer override value: " + v);
    }
  };
  auto parse_dbl = [&](const std::string& v) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) throw ConfigError("bad numeric override value: " + v);
      return d;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("bad numeric override value: " + v);
    }
  };
  if (key == "pn_model") {
    s.pn_model = value;
  } else if (key == "fc_ghz") {
    s.fc_ghz = parse_dbl(value);
  } else if (key == "modulation") {
    s.modulation = value;
  } else if (key == "n_tx") {
    s.n_tx = parse_u64(value);
  } else if (key == "n_rx") {
    s.n_rx = parse_u64(value);
  } else if (key == "snr_db") {
    s.snr_db = value == "no-noise" ? std::optional<double>{} : std::optional<double>{parse_dbl(value)};
  } else if (key == "cpe_compensation") {
    s.cpe_compensation = parse_bool(value);
  } else if (key == "channel_profile") {
    s.channel_profile = value;
  } else if (key == "n_frames") {
    s.n_frames = parse_u64(value);
  } else if (key == "master_seed") {
    s.master_seed = parse_u64(value);
  } else if (key == "genie.timing") {
    s.genie.timing = parse_bool(value);
  } else if (key == "genie.noise_var") {
    s.genie.noise_var = parse_bool(value);
  } else {
    throw ConfigError("unknown override key: " + key);
  }
}

// ---- metadata ---------------------------------------------------------------

inline nlohmann::json scenario_to_json(const ScenarioConfig& s) {
  nlohmann::json j;
  j["pn_model"] = s.pn_model;
  j["fc_ghz"] = s.fc_ghz;
  j["modulation"] = s.modulation;
  j["n_tx"] = s.n_tx;
  j["n_rx"] = s.n_rx;
  if (s.snr_db.has_value()) {
    j["snr_db"] = s.snr_db.value();
  } else {
    j["snr_db"] = "no-noise";
  }
  j["cpe_compensation"] = s.cpe_compensation;
  j["channel_profile"] = s.channel_profile;
  j["n_frames"] = s.n_frames;
  j["master_seed"] = s.master_seed;
  j["genie"] = {{"timing", s.genie.timing}, {"noise_var", s.genie.noise_var}};
  return j;
}

inline nlohmann::json sweep_to_json(const SweepConfig& cfg) {
  nlohmann::json axes;
  if (!cfg.pn_models.empty()) axes["pn_model"] = cfg.pn_models;
  if (!cfg.modulations.empty()) axes["modulation"] = cfg.modulations;
  if (!cfg.n_tx_axis.empty()) axes["n_tx"] = cfg.n_tx_axis;
  if (!cfg.n_rx_axis.empty()) axes["n_rx"] = cfg.n_rx_axis;
  if (!cfg.channel_axis.empty()) axes["channel_profile"] = cfg.channel_axis;
  nlohmann::json snrs = nlohmann::json::array();
  for (const auto& s : cfg.snr_axis) {
    if (s.has_value()) {
      snrs.push_back(s.value());
    } else {
      snrs.push_back("no-noise");
    }
  }
  axes["snr_db"] = snrs;
  if (!cfg.cpe_axis.empty()) axes["cpe_compensation"] = cfg.cpe_axis;
  nlohmann::json j;
  j["base"] = scenario_to_json(cfg.base);
  j["axes"] = axes;
  j["seeds"] = cfg.n_seeds;
  j["master_seed"] = cfg.master_seed;
  return j;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string sweep_metadata(const SweepConfig& cfg, const SweepResult& result,
                                  const std::string& csv_path) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["generated_utc"] = utc_timestamp();
  j["csv"] = csv_path;
  j["rows"] = result.rows.size();
  j["errors"] = result.errors;
  j["config"] = {{"sweep", sweep_to_json(cfg)}};
  return j.dump(2) + "\n";
}

// ---- figure-ready aggregation ----------------------------------------------

namespace detail {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.push_back("");
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      t.rows.push_back(std::move(fields));
    }
  }
  return t;
}

inline std::size_t column_of(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) return i;
  }
  throw ConfigError("input csv is missing column: " + name);
}

}  // namespace detail

// Collapses a sweep result table into per-figure series. Rows that errored
// (nan metrics) or ran without noise are left out; means are taken per seed
// group in row order.
inline std::string plot_data(const std::string& csv_text, const std::string& figure) {
  const detail::CsvTable t = detail::parse_csv(csv_text);
  if (t.header.empty()) throw ConfigError("input csv is empty");
  const std::size_t c_pn = detail::column_of(t, "pn_model");
  const std::size_t c_mod = detail::column_of(t, "modulation");
  const std::size_t c_ntx = detail::column_of(t, "n_tx");
  const std::size_t c_nrx = detail::column_of(t, "n_rx");
  const std::size_t c_snr = detail::column_of(t, "snr_db");
  const std::size_t c_cpe = detail::column_of(t, "cpe_comp");
  const std::size_t c_evm = detail::column_of(t, "evm_pct");
  const std::size_t c_bler = detail::column_of(t, "bler");

  using SeriesKey = std::tuple<std::string, std::string, std::string, std::string,
                               std::string, double>;
  std::map<SeriesKey, std::pair<double, std::size_t>> acc;  // sum, count
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw ConfigError("ragged csv row");
    if (row[c_snr] == "no-noise") continue;
    const double snr = std::strtod(row[c_snr].c_str(), nullptr);
    const std::size_t c_metric = figure == "bler_vs_snr" ? c_bler : c_evm;
    const double metric = std::strtod(row[c_metric].c_str(), nullptr);
    if (std::isnan(metric)) continue;
    SeriesKey key{row[c_pn], row[c_mod], row[c_ntx], row[c_nrx], row[c_cpe], snr};
    auto& slot = acc[key];
    slot.first += metric;
    slot.second += 1;
  }

  std::string out;
  if (figure == "evm_vs_snr" || figure == "bler_vs_snr") {
    const bool evm = figure == "evm_vs_snr";
    out = evm ? "pn_model,modulation,n_tx,n_rx,cpe_comp,snr_db,mean_evm_pct,mean_evm_db\n"
              : "pn_model,modulation,n_tx,n_rx,cpe_comp,snr_db,mean_bler\n";
    for (const auto& [key, sum_count] : acc) {
      const double mean = sum_count.first / static_cast<double>(sum_count.second);
      out += std::get<0>(key) + ',' + std::get<1>(key) + ',' + std::get<2>(key) + ',' +
             std::get<3>(key) + ',' + std::get<4>(key) + ',' +
             detail::fmt_double(std::get<5>(key)) + ',' + detail::fmt_double(mean);
      if (evm) out += ',' + detail::fmt_double(evm_db_from_pct(mean));
      out += '\n';
    }
    return out;
  }
  if (figure == "pn_compare") {
    // pair the compensation arms per (model, modulation, antennas, snr)
    using PairKey = std::tuple<std::string, std::string, std::string, std::string, double>;
    std::map<PairKey, std::pair<std::optional<double>, std::optional<double>>> pairs;
    for (const auto& [key, sum_count] : acc) {
      const double mean = sum_count.first / static_cast<double>(sum_count.second);
      PairKey pk{std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key),
                 std::get<5>(key)};
      if (std::get<4>(key) == "on") {
        pairs[pk].first = mean;
      } else {
        pairs[pk].second = mean;
      }
    }
    out = "pn_model,modulation,n_tx,n_rx,snr_db,evm_on_pct,evm_off_pct,improvement_pct\n";
    for (const auto& [key, arms] : pairs) {
      if (!arms.first.has_value() || !arms.second.has_value()) continue;
      const double on = arms.first.value(), off = arms.second.value();
      const double improvement = off > 0.0 ? 100.0 * (off - on) / off : 0.0;
      out += std::get<0>(key) + ',' + std::get<1>(key) + ',' + std::get<2>(key) + ',' +
             std::get<3>(key) + ',' + detail::fmt_double(std::get<4>(key)) + ',' +
             detail::fmt_double(on) + ',' + detail::fmt_double(off) + ',' +
             detail::fmt_double(improvement) + '\n';
    }
    return out;
  }
  throw ConfigError("unknown figure: " + figure);
}

}  // namespace nrlink
