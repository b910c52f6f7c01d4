// Command-line front end: psd curves, single link runs, sweeps, figure data,
// and the acceptance checklist.
//
// Exit codes: 0 success, 1 bad configuration or usage, 2 runtime failure,
// 3 acceptance criterion failed.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nrlink/acceptance.hpp"
#include "nrlink/campaign.hpp"
#include "nrlink/sweep_io.hpp"
#include "nrlink/version.hpp"

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int do_psd(const std::string& model, double fmin, double fmax, int points,
           const std::string& out_path) {
  nrlink::PhaseNoiseModel m;
  try {
    m = nrlink::pn_preset(model);
  } catch (const std::invalid_argument& e) {
    throw nrlink::ConfigError(e.what());
  }
  if (fmin <= 0.0 || fmax <= fmin) throw nrlink::ConfigError("need 0 < fmin < fmax");
  if (points < 2) throw nrlink::ConfigError("need at least 2 points");
  std::string text = "offset_hz,psd_dbc_hz\n";
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    const double f = fmin * std::pow(fmax / fmin, t);
    text += nrlink::detail::fmt_double(f);
    text += ',';
    text += nrlink::detail::fmt_double(nrlink::psd_at(m, f));
    text += '\n';
  }
  write_text(out_path, text);
  return 0;
}

int do_run(const std::string& config_path, const std::vector<std::string>& overrides,
           const std::string& grid_path, const std::string& cpe_path) {
  nrlink::SimConfig cfg = nrlink::load_config_file(config_path);
  if (!cfg.scenario.has_value()) {
    throw nrlink::ConfigError("config has no scenario section");
  }
  nrlink::ScenarioConfig s = cfg.scenario.value();
  for (const std::string& ov : overrides) {
    const std::size_t eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw nrlink::ConfigError("override must look like key=value: " + ov);
    }
    nrlink::apply_override(s, ov.substr(0, eq), ov.substr(eq + 1));
  }

  nrlink::LinkDiagnostics diag;
  const nrlink::LinkMetrics m = nrlink::run_link(s, cfg.profiles, 0, &diag);

  std::printf("pn_model       %s\n", s.pn_model.c_str());
  std::printf("fc_ghz         %s\n", nrlink::detail::fmt_double(nrlink::resolve_fc_ghz(s)).c_str());
  std::printf("modulation     %s\n", s.modulation.c_str());
  std::printf("snr_db         %s\n", nrlink::detail::fmt_snr(s.snr_db).c_str());
  std::printf("cpe_comp       %s\n", s.cpe_compensation ? "on" : "off");
  std::printf("timing_offset  %zu\n", diag.timing_offset);
  std::printf("evm_pct        %s\n", nrlink::detail::fmt_double(m.evm_pct).c_str());
  std::printf("evm_db         %s\n", nrlink::detail::fmt_double(m.evm_db).c_str());
  std::printf("ber            %s\n", nrlink::detail::fmt_double(m.ber).c_str());
  std::printf("bler           %s\n", nrlink::detail::fmt_double(m.bler).c_str());
  std::printf("n_bits         %zu\n", m.n_bits);
  std::printf("n_blocks       %zu\n", m.n_blocks);

  if (!grid_path.empty()) {
    const nrlink::CarrierConfig cc = nrlink::nr_60khz_66rb();
    nrlink::PdschConfig pc;
    pc.modulation = nrlink::modulation_from_string(s.modulation);
    const std::vector<nrlink::Role> roles = nrlink::slot_roles(cc, pc);
    const std::size_t n_sc = cc.n_subcarriers();
    const std::size_t per_slot = nrlink::n_data_re(cc, pc);
    std::string text = "slot,sym,sc,tx_re,tx_im,eq_re,eq_im\n";
    const std::size_t n_slots = diag.eq_symbols.size() / per_slot;
    std::size_t flat = 0;
    for (std::size_t slot = 0; slot < n_slots; ++slot) {
      for (std::size_t i = 0; i < roles.size(); ++i) {
        if (roles[i] != nrlink::Role::kData) continue;
        const nrlink::cplx tx = diag.ref_symbols[flat];
        const nrlink::cplx eq = diag.eq_symbols[flat];
        ++flat;
        text += std::to_string(slot) + ',' + std::to_string(i / n_sc) + ',' +
                std::to_string(i % n_sc) + ',' + nrlink::detail::fmt_double(tx.real()) +
                ',' + nrlink::detail::fmt_double(tx.imag()) + ',' +
                nrlink::detail::fmt_double(eq.real()) + ',' +
                nrlink::detail::fmt_double(eq.imag()) + '\n';
      }
    }
    write_text(grid_path, text);
  }
  if (!cpe_path.empty()) {
    std::string text = "slot,sym,phi_rad\n";
    for (std::size_t slot = 0; slot < diag.cpe_phi.size(); ++slot) {
      for (std::size_t sym = 0; sym < diag.cpe_phi[slot].size(); ++sym) {
        text += std::to_string(slot) + ',' + std::to_string(sym) + ',' +
                nrlink::detail::fmt_double(diag.cpe_phi[slot][sym]) + '\n';
      }
    }
    write_text(cpe_path, text);
  }
  return 0;
}

int do_sweep(const std::string& config_path, const std::string& out_path,
             std::size_t jobs) {
  nrlink::SimConfig cfg = nrlink::load_config_file(config_path);
  if (!cfg.sweep.has_value()) throw nrlink::ConfigError("config has no sweep section");
  if (jobs < 1) throw nrlink::ConfigError("jobs must be at least 1");
  const nrlink::SweepResult result = nrlink::run_sweep(cfg.sweep.value(), cfg.profiles, jobs);
  write_text(out_path, nrlink::sweep_csv(result));
  write_text(out_path + ".meta.json",
             nrlink::sweep_metadata(cfg.sweep.value(), result, out_path));
  std::printf("wrote %zu rows to %s\n", result.rows.size(), out_path.c_str());
  for (const std::string& e : result.errors) {
    std::fprintf(stderr, "warning: %s\n", e.c_str());
  }
  return 0;
}

int do_plot_data(const std::string& in_path, const std::string& figure,
                 const std::string& out_path) {
  std::ifstream in(in_path, std::ios::binary);
  if (!in) throw nrlink::ConfigError("cannot open " + in_path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  write_text(out_path, nrlink::plot_data(text, figure));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmwave downlink link simulator"};
  app.set_version_flag("--version", nrlink::kVersion);
  app.require_subcommand(1);

  std::string psd_model = "A", psd_out;
  double psd_fmin = 1e3, psd_fmax = 1e8;
  int psd_points = 200;
  CLI::App* psd = app.add_subcommand("psd", "tabulate an oscillator psd curve");
  psd->add_option("--model", psd_model, "oscillator preset: A, B, or C");
  psd->add_option("--fmin", psd_fmin, "lowest frequency offset in Hz");
  psd->add_option("--fmax", psd_fmax, "highest frequency offset in Hz");
  psd->add_option("--points", psd_points, "number of log-spaced samples");
  psd->add_option("--out", psd_out, "output csv path (default stdout)");

  std::string run_config, run_grid, run_cpe;
  std::vector<std::string> run_overrides;
  CLI::App* run = app.add_subcommand("run", "run one link scenario");
  run->add_option("--config", run_config, "scenario config json")->required();
  run->add_option("--override", run_overrides, "key=value scenario override");
  run->add_option("--dump-grid", run_grid, "write tx/equalized data symbols to csv");
  run->add_option("--dump-cpe", run_cpe, "write per-symbol phase estimates to csv");

  std::string sweep_config, sweep_out;
  std::size_t sweep_jobs = 1;
  CLI::App* sweep = app.add_subcommand("sweep", "run a scenario sweep");
  sweep->add_option("--config", sweep_config, "sweep config json")->required();
  sweep->add_option("--out", sweep_out, "output csv path")->required();
  sweep->add_option("--jobs", sweep_jobs, "worker threads");

  std::string plot_in, plot_figure, plot_out;
  CLI::App* plot = app.add_subcommand("plot-data", "aggregate sweep csv into figure data");
  plot->add_option("--in", plot_in, "sweep result csv")->required();
  plot->add_option("--figure", plot_figure, "evm_vs_snr, bler_vs_snr, or pn_compare")
      ->required();
  plot->add_option("--out", plot_out, "output csv path (default stdout)");

  int check_only = 0;
  CLI::App* check = app.add_subcommand("check", "run the acceptance checklist");
  check->add_option("--criterion", check_only, "run a single criterion (1-12)")
      ->check(CLI::Range(1, nrlink::kNumCriteria));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (psd->parsed()) return do_psd(psd_model, psd_fmin, psd_fmax, psd_points, psd_out);
    if (run->parsed()) return do_run(run_config, run_overrides, run_grid, run_cpe);
    if (sweep->parsed()) return do_sweep(sweep_config, sweep_out, sweep_jobs);
    if (plot->parsed()) return do_plot_data(plot_in, plot_figure, plot_out);
    if (check->parsed()) return nrlink::run_checklist(check_only, stdout) ? 0 : 3;
  } catch (const nrlink::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
