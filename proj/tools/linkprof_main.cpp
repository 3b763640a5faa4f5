// linkprof: simulate multi-span fiber links and estimate longitudinal
// PPE/NPPE/gOSNR profiles from the received waveform.
//
// Exit codes: 0 ok, 2 config error, 3 runtime error,
//             4 completed with flagged profile points.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "linkprof/io.hpp"
#include "linkprof/scenario.hpp"

namespace lp = linkprof;
namespace fs = std::filesystem;

namespace {

lp::ScenarioConfig load_config(const std::string& config_path,
                               const std::string& preset_name) {
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) throw lp::config_error("cannot open config: " + config_path);
    nlohmann::json j;
    f >> j;
    return j.get<lp::ScenarioConfig>();
  }
  if (!preset_name.empty()) return lp::preset(preset_name);
  throw lp::config_error("either --config or --preset is required");
}

struct CommonOpts {
  std::string config_path;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> blocks;
  std::optional<double> pin_dbm;
  std::optional<std::size_t> inject_span;
  std::optional<double> inject_snr_db;
  std::optional<double> neighbor_power_dbm;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "Scenario config JSON file");
  cmd->add_option("--preset", o.preset_name, "Preset name (see `preset list`)");
  cmd->add_option("--seed", o.seed, "Root seed override");
  cmd->add_option("--blocks", o.blocks, "Block count override");
  cmd->add_option("--pin", o.pin_dbm, "Launch power override, dBm");
  cmd->add_option("--inject-span", o.inject_span,
                  "Move all standalone noise injections to this span input");
  cmd->add_option("--inject-snr-db", o.inject_snr_db,
                  "Set-SNR override for standalone noise injections, dB");
  cmd->add_option("--neighbor-power-dbm", o.neighbor_power_dbm,
                  "WDM neighbor power override, dBm");
  cmd->add_option("--out", o.out_dir, "Output directory override");
}

lp::ScenarioConfig resolve(const CommonOpts& o) {
  lp::ScenarioConfig cfg = load_config(o.config_path, o.preset_name);
  if (o.seed) cfg.seed = *o.seed;
  if (o.blocks) cfg.signal.blocks = *o.blocks;
  if (o.pin_dbm) cfg.link.launch_power_dbm = *o.pin_dbm;
  if (o.inject_span)
    for (auto& inj : cfg.link.noise_injections) inj.at_span_input = *o.inject_span;
  if (o.inject_snr_db)
    for (auto& inj : cfg.link.noise_injections) inj.set_snr_db = *o.inject_snr_db;
  if (o.neighbor_power_dbm)
    for (auto& nb : cfg.link.wdm_neighbors) nb.power_dbm = *o.neighbor_power_dbm;
  if (!o.out_dir.empty()) cfg.outputs = o.out_dir;
  lp::validate(cfg);
  return cfg;
}

int cmd_run(const CommonOpts& o, bool svg, bool nli_reference) {
  lp::ScenarioConfig cfg = resolve(o);
  lp::RunResult res = lp::run(cfg, nli_reference, svg);
  std::cout << "wrote " << res.artifact_paths.size() << " artifacts to " << cfg.outputs
            << "\n";
  for (const auto& p : res.artifact_paths) std::cout << "  " << p << "\n";
  if (res.flagged_points > 0) {
    std::cout << res.flagged_points << " profile point(s) flagged\n";
    return 4;
  }
  return 0;
}

int cmd_simulate(const CommonOpts& o) {
  lp::ScenarioConfig cfg = resolve(o);
  const lp::PropagationPlan plan = lp::compile(cfg.link);
  fs::create_directories(cfg.outputs);
  nlohmann::json manifest = {{"config", nlohmann::json(cfg)},
                             {"root_seed", cfg.seed},
                             {"library_version", lp::kLibraryVersion},
                             {"captures", nlohmann::json::array()}};
  for (std::size_t b = 0; b < cfg.signal.blocks; ++b) {
    const auto seeds = lp::detail::block_seeds(cfg.seed, b);
    lp::SymbolFrame frame = lp::generate_symbols(cfg.signal.symbols_per_block,
                                                 cfg.signal.pol_count, seeds.symbols);
    frame.baud_rate_hz = cfg.signal.baud_hz;
    lp::ComplexWaveform tx =
        lp::shape_pulse(frame, cfg.signal.rolloff, cfg.signal.samples_per_symbol);
    tx = lp::set_average_power(tx, cfg.link.launch_power_dbm);
    lp::SsfmConfig ssfm = cfg.ssfm;
    ssfm.signal_baud_hz = cfg.signal.baud_hz;
    lp::ComplexWaveform rx = lp::propagate(tx, plan, ssfm, seeds.propagation);
    char name[64];
    std::snprintf(name, sizeof name, "capture_b%03zu.fpwv", b);
    const std::string path = (fs::path(cfg.outputs) / name).string();
    lp::write_fpwv(path, rx);
    manifest["captures"].push_back({{"block", b}, {"path", path}});
    std::cout << "wrote " << path << "\n";
  }
  lp::write_text_file((fs::path(cfg.outputs) / "capture_manifest.json").string(),
                      manifest.dump(2) + "\n");
  return 0;
}

int cmd_estimate(const CommonOpts& o, const std::vector<std::string>& waveforms,
                 bool blind) {
  lp::ScenarioConfig cfg = resolve(o);
  const lp::PropagationPlan plan = lp::compile(cfg.link);
  const std::vector<double> z_grid =
      lp::make_z_grid(plan.total_length_km, cfg.estimator.z_step_km);
  lp::ProfileAccumulator acc(z_grid, plan);
  bool unreliable = false;
  std::size_t block = 0;
  for (const auto& path : waveforms) {
    lp::ComplexWaveform rx = lp::read_fpwv(path);
    const double rx_bw = (1.0 + cfg.signal.rolloff) * cfg.signal.baud_hz;
    rx = lp::band_limit(rx, 0.0, rx_bw);
    lp::ComplexWaveform w0 = lp::compensate_dispersion(rx, plan);
    std::optional<lp::SymbolFrame> hint;
    if (!blind) {
      const auto seeds = lp::detail::block_seeds(cfg.seed, block);
      lp::SymbolFrame frame = lp::generate_symbols(
          w0.size() / cfg.signal.samples_per_symbol, w0.pol_count(), seeds.symbols);
      frame.baud_rate_hz = cfg.signal.baud_hz;
      hint = std::move(frame);
    }
    lp::DemodResult demod = lp::demodulate(w0, hint, cfg.signal.baud_hz,
                                           cfg.signal.rolloff,
                                           cfg.signal.samples_per_symbol);
    unreliable = unreliable || demod.unreliable;
    lp::RxOutput out = lp::build_reference_and_residual(
        w0, hint ? *hint : demod.decided, cfg.signal.rolloff,
        cfg.signal.samples_per_symbol);
    acc.add_block(out);
    ++block;
  }
  lp::CorrelationProfile ppe =
      lp::apply_convention(acc.finalize(lp::ProfileKind::ppe), cfg.estimator.convention);
  lp::CorrelationProfile nppe = lp::apply_convention(
      acc.finalize(lp::ProfileKind::nppe), cfg.estimator.convention);
  lp::GosnrProfile g = lp::gosnr_from_profiles(ppe, nppe, cfg.signal.baud_hz,
                                               cfg.estimator.ceiling_db,
                                               cfg.estimator.floor_db);
  fs::create_directories(cfg.outputs);
  lp::write_text_file((fs::path(cfg.outputs) / "ppe.csv").string(), lp::profile_csv(ppe));
  lp::write_text_file((fs::path(cfg.outputs) / "nppe.csv").string(),
                      lp::profile_csv(nppe));
  lp::write_text_file((fs::path(cfg.outputs) / "gosnr.csv").string(), lp::gosnr_csv(g));
  std::cout << "wrote profiles to " << cfg.outputs << "\n";
  if (unreliable) std::cout << "warning: unreliable decisions in at least one block\n";
  std::size_t flagged = 0;
  for (auto v : g.validity)
    if (v != lp::PointValidity::ok) ++flagged;
  return flagged ? 4 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Longitudinal PPE/NPPE/gOSNR estimation over simulated fiber links"};
  app.require_subcommand(1);

  CommonOpts run_opts, sim_opts, est_opts;
  bool svg = false, nli_reference = false, blind = false;
  std::vector<std::string> waveforms;

  CLI::App* run_cmd = app.add_subcommand("run", "End-to-end: simulate + estimate");
  add_common(run_cmd, run_opts);
  run_cmd->add_flag("--svg", svg, "Also emit SVG plots");
  run_cmd->add_flag("--nli-reference", nli_reference,
                    "Also compute the ASE+NLI reference profile");

  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "Propagate and write FPWV waveform captures");
  add_common(sim_cmd, sim_opts);

  CLI::App* est_cmd =
      app.add_subcommand("estimate", "Estimate profiles from FPWV captures");
  add_common(est_cmd, est_opts);
  est_cmd->add_option("--waveform", waveforms, "FPWV capture file (repeatable)")
      ->required();
  est_cmd->add_flag("--blind", blind, "Blind demodulation (no regenerated symbols)");

  CLI::App* preset_cmd = app.add_subcommand("preset", "Preset utilities");
  CLI::App* preset_list = preset_cmd->add_subcommand("list", "List preset names");
  std::string show_name;
  CLI::App* preset_show = preset_cmd->add_subcommand("show", "Print a preset config");
  preset_show->add_option("name", show_name, "Preset name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run_opts, svg, nli_reference);
    if (sim_cmd->parsed()) return cmd_simulate(sim_opts);
    if (est_cmd->parsed()) return cmd_estimate(est_opts, waveforms, blind);
    if (preset_list->parsed()) {
      for (const auto& n : lp::preset_names()) std::cout << n << "\n";
      return 0;
    }
    if (preset_show->parsed()) {
      std::cout << nlohmann::json(lp::preset(show_name)).dump(2) << "\n";
      return 0;
    }
  } catch (const lp::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const lp::invalid_argument_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
