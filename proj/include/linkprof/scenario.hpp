#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "linkprof/common.hpp"
#include "linkprof/correlation.hpp"
#include "linkprof/gosnr.hpp"
#include "linkprof/io.hpp"
#include "linkprof/link.hpp"
#include "linkprof/rx.hpp"
#include "linkprof/ssfm.hpp"
#include "linkprof/svg.hpp"
#include "linkprof/waveform.hpp"

namespace linkprof {

inline constexpr const char* kLibraryVersion = "0.1.0";

struct SignalConfig {
  double baud_hz = 68e9;
  std::size_t pol_count = 2;
  double rolloff = 0.1;
  std::size_t samples_per_symbol = 2;
  std::size_t symbols_per_block = 1u << 17;
  std::size_t blocks = 16;
};

struct EstimatorConfig {
  double z_step_km = 5.0;
  CorrelationConvention convention = CorrelationConvention::real_part;
  double ceiling_db = 40.0;
  double floor_db = -10.0;
  bool genie = true;  // known transmitted symbols; blind 4th-power otherwise
};

struct ScenarioConfig {
  std::string name = "custom";
  LinkSpec link;
  SignalConfig signal;
  SsfmConfig ssfm;
  EstimatorConfig estimator;
  std::uint64_t seed = 1;
  std::string outputs = "out";
  std::vector<std::string> deviations;  // desk-scale deviations, echoed in manifest
};

inline void validate(const ScenarioConfig& c) {
  if (c.signal.blocks < 1) throw config_error("signal.blocks: must be >= 1");
  const auto n = c.signal.symbols_per_block;
  if (n == 0 || (n & (n - 1)) != 0)
    throw config_error("signal.symbols_per_block: must be a power of two");
  if (c.signal.pol_count != 1 && c.signal.pol_count != 2)
    throw config_error("signal.pol_count: must be 1 or 2");
  if (c.signal.samples_per_symbol < 2)
    throw config_error("signal.samples_per_symbol: must be >= 2");
  if (c.signal.rolloff < 0.0 || c.signal.rolloff > 1.0)
    throw config_error("signal.rolloff: must be in [0,1]");
  if (c.link.spans.empty()) throw config_error("link.spans: at least one span required");
  if (c.ssfm.step_km <= 0.0) throw config_error("ssfm.step_km: must be > 0");
  const double fs = c.signal.baud_hz * static_cast<double>(c.signal.samples_per_symbol);
  for (const auto& nb : c.link.wdm_neighbors) {
    const double edge = std::abs(nb.center_offset_hz) +
                        (1.0 + c.signal.rolloff) * c.signal.baud_hz / 2.0;
    if (edge > fs / 2.0)
      throw config_error("link.wdm_neighbors: channel outside simulated band; "
                         "increase signal.samples_per_symbol");
  }
}

// ---- JSON ------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const SignalConfig& s) {
  j = {{"baud_hz", s.baud_hz},
       {"pol_count", s.pol_count},
       {"rolloff", s.rolloff},
       {"samples_per_symbol", s.samples_per_symbol},
       {"symbols_per_block", s.symbols_per_block},
       {"blocks", s.blocks}};
}

inline void from_json(const nlohmann::json& j, SignalConfig& s) {
  s.baud_hz = j.value("baud_hz", 68e9);
  s.pol_count = j.value("pol_count", std::size_t{2});
  s.rolloff = j.value("rolloff", 0.1);
  s.samples_per_symbol = j.value("samples_per_symbol", std::size_t{2});
  s.symbols_per_block = j.value("symbols_per_block", std::size_t{1} << 17);
  s.blocks = j.value("blocks", std::size_t{16});
}

inline void to_json(nlohmann::json& j, const SsfmConfig& s) {
  j = {{"step_km", s.step_km}, {"manakov", s.manakov}};
}

inline void from_json(const nlohmann::json& j, SsfmConfig& s) {
  s.step_km = j.value("step_km", 0.25);
  s.manakov = j.value("manakov", true);
}

inline void to_json(nlohmann::json& j, const EstimatorConfig& e) {
  j = {{"z_step_km", e.z_step_km},
       {"correlation_convention",
        e.convention == CorrelationConvention::real_part ? "real" : "magnitude"},
       {"ceiling_db", e.ceiling_db},
       {"floor_db", e.floor_db},
       {"mode", e.genie ? "genie" : "blind"}};
}

inline void from_json(const nlohmann::json& j, EstimatorConfig& e) {
  e.z_step_km = j.value("z_step_km", 5.0);
  const std::string conv = j.value("correlation_convention", std::string("real"));
  if (conv == "real")
    e.convention = CorrelationConvention::real_part;
  else if (conv == "magnitude")
    e.convention = CorrelationConvention::magnitude;
  else
    throw config_error("estimator.correlation_convention: must be real|magnitude");
  e.ceiling_db = j.value("ceiling_db", 40.0);
  e.floor_db = j.value("floor_db", -10.0);
  const std::string mode = j.value("mode", std::string("genie"));
  if (mode != "genie" && mode != "blind")
    throw config_error("estimator.mode: must be genie|blind");
  e.genie = (mode == "genie");
}

inline void to_json(nlohmann::json& j, const ScenarioConfig& c) {
  j = {{"name", c.name},          {"link", c.link},
       {"signal", c.signal},      {"ssfm", c.ssfm},
       {"estimator", c.estimator},{"seed", c.seed},
       {"outputs", c.outputs},    {"deviations", c.deviations}};
}

inline void from_json(const nlohmann::json& j, ScenarioConfig& c) {
  c.name = j.value("name", std::string("custom"));
  if (!j.contains("link")) throw config_error("link: required");
  c.link = j.at("link").get<LinkSpec>();
  c.signal = j.value("signal", SignalConfig{});
  c.ssfm = j.value("ssfm", SsfmConfig{});
  c.estimator = j.value("estimator", EstimatorConfig{});
  if (!j.contains("seed")) throw config_error("seed: required (no wall-clock seeding)");
  c.seed = j.at("seed").get<std::uint64_t>();
  c.outputs = j.value("outputs", std::string("out"));
  c.deviations = j.value("deviations", std::vector<std::string>{});
}

// ---- Per-block pipeline ------------------------------------------------------

namespace detail {

struct BlockSeeds {
  std::uint64_t symbols;
  std::uint64_t propagation;
};

inline BlockSeeds block_seeds(std::uint64_t root, std::size_t block) {
  return {derive_seed(root, block * 1024 + 1), derive_seed(root, block * 1024 + 2)};
}

inline std::uint64_t neighbor_seed(std::uint64_t root, std::size_t block,
                                   std::size_t neighbor, std::uint64_t declared) {
  return derive_seed(derive_seed(root, block * 1024 + 16 + neighbor), declared);
}

}  // namespace detail

// One independent simulate-then-receive block: symbols -> RRC -> launch power
// -> (WDM mux) -> SSFM -> (channel select) -> CDC -> band limit -> demodulate
// -> reference/residual split.
inline RxOutput process_block(const ScenarioConfig& cfg, const PropagationPlan& plan,
                              std::size_t block) {
  const auto seeds = detail::block_seeds(cfg.seed, block);
  SymbolFrame frame = generate_symbols(cfg.signal.symbols_per_block,
                                       cfg.signal.pol_count, seeds.symbols);
  frame.baud_rate_hz = cfg.signal.baud_hz;
  ComplexWaveform tx = shape_pulse(frame, cfg.signal.rolloff,
                                   cfg.signal.samples_per_symbol);
  tx = set_average_power(tx, cfg.link.launch_power_dbm);

  ComplexWaveform field = tx;
  if (!cfg.link.wdm_neighbors.empty()) {
    std::vector<std::pair<ComplexWaveform, double>> channels;
    channels.push_back({std::move(field), 0.0});
    std::size_t ni = 0;
    for (const auto& nb : cfg.link.wdm_neighbors) {
      SymbolFrame nf = generate_symbols(
          cfg.signal.symbols_per_block, cfg.signal.pol_count,
          detail::neighbor_seed(cfg.seed, block, ni, nb.seed));
      nf.baud_rate_hz = cfg.signal.baud_hz;
      ComplexWaveform nw = shape_pulse(nf, cfg.signal.rolloff,
                                       cfg.signal.samples_per_symbol);
      nw = set_average_power(nw, nb.power_dbm);
      channels.push_back({std::move(nw), nb.center_offset_hz});
      ++ni;
    }
    field = wdm_multiplex(channels);
  }

  SsfmConfig ssfm = cfg.ssfm;
  ssfm.signal_baud_hz = cfg.signal.baud_hz;
  ssfm.manakov = cfg.ssfm.manakov && cfg.signal.pol_count == 2;
  ComplexWaveform rx_field = propagate(field, plan, ssfm, seeds.propagation);

  // Receiver front end: the estimator works on the signal band only.
  const double rx_bw = (1.0 + cfg.signal.rolloff) * cfg.signal.baud_hz;
  if (!cfg.link.wdm_neighbors.empty())
    rx_field = channel_select(rx_field, 0.0, rx_bw);
  else
    rx_field = band_limit(rx_field, 0.0, rx_bw);

  ComplexWaveform w0 = compensate_dispersion(rx_field, plan);
  std::optional<SymbolFrame> hint;
  if (cfg.estimator.genie) hint = frame;
  DemodResult demod = demodulate(w0, hint, cfg.signal.baud_hz, cfg.signal.rolloff,
                                 cfg.signal.samples_per_symbol);
  RxOutput out = build_reference_and_residual(
      w0, cfg.estimator.genie ? frame : demod.decided, cfg.signal.rolloff,
      cfg.signal.samples_per_symbol);
  out.decision_error_rate = demod.error_rate;
  out.unreliable_decisions = demod.unreliable;
  return out;
}

// End-of-link effective SNR (dB) in the receiver band, measured as fitted
// reference power over residual power, averaged across blocks. The gOSNR
// reference is this value plus 10*log10(R).
inline double effective_snr_oracle(const ScenarioConfig& cfg, std::uint64_t seed,
                                   std::size_t blocks) {
  ScenarioConfig c = cfg;
  c.seed = seed;
  const PropagationPlan plan = compile(c.link);
  double snr_sum = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    RxOutput rx = process_block(c, plan, b);
    const double sig = average_power_mw(rx.u_ref);  // == 1 after normalization
    const double noise = average_power_mw(rx.delta_e);
    snr_sum += sig / std::max(noise, 1e-30);
  }
  return lin_to_db(snr_sum / static_cast<double>(blocks));
}

// ASE+NLI reference: analytic ASE accumulation combined with a noise-free
// nonlinear run that measures the end-of-link NLI, spread along the link in
// proportion to distance (equal-span, constant-launch links).
inline ReferenceProfile reference_gosnr_with_nli(const ScenarioConfig& cfg,
                                                 const std::vector<double>& z_grid) {
  ScenarioConfig quiet = cfg;
  quiet.link.noise_injections.clear();
  for (auto& a : quiet.link.amps) a.noise_mode = NoiseMode::none;
  const double snr_nli_db = effective_snr_oracle(quiet, derive_seed(cfg.seed, 0xFACE),
                                                 std::min<std::size_t>(cfg.signal.blocks, 4));
  const double inv_nli_end = 1.0 / db_to_lin(snr_nli_db);
  ReferenceProfile ase = analytic_ase_osnr(cfg.link, z_grid, cfg.signal.baud_hz,
                                           cfg.estimator.ceiling_db);
  const double r = cfg.signal.baud_hz / kOsnrRefBandwidth_hz;
  ReferenceProfile ref;
  ref.includes = "ase,nli";
  ref.z_grid_km = z_grid;
  ref.osnr_db.resize(z_grid.size());
  const double total = cfg.link.total_length_km();
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    const double inv_ase = r / db_to_lin(ase.osnr_db[i]);
    const double inv_nli = inv_nli_end * (total > 0.0 ? z_grid[i] / total : 0.0);
    const double inv = inv_ase + inv_nli;
    ref.osnr_db[i] = (inv > 0.0) ? lin_to_db(r / inv) : cfg.estimator.ceiling_db;
    if (ref.osnr_db[i] > cfg.estimator.ceiling_db)
      ref.osnr_db[i] = cfg.estimator.ceiling_db;
  }
  return ref;
}

// ---- Run --------------------------------------------------------------------

struct RunResult {
  CorrelationProfile ppe;
  CorrelationProfile nppe;
  GosnrProfile gosnr;
  ReferenceProfile reference_ase;
  std::optional<ReferenceProfile> reference_nli;
  std::vector<std::string> artifact_paths;
  nlohmann::json manifest;
  std::size_t flagged_points = 0;
  bool unreliable_decisions = false;
};

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline CorrelationProfile apply_convention(CorrelationProfile p,
                                           CorrelationConvention conv) {
  if (conv == CorrelationConvention::magnitude)
    for (std::size_t i = 0; i < p.values.size(); ++i)
      p.values[i] = std::hypot(p.values[i], p.values_imag[i]);
  return p;
}

// Full estimation pass (no file I/O): blocks -> PPE/NPPE -> gOSNR + references.
inline RunResult estimate_profiles(const ScenarioConfig& cfg, bool with_nli_reference) {
  validate(cfg);
  const PropagationPlan plan = compile(cfg.link);
  const std::vector<double> z_grid =
      make_z_grid(plan.total_length_km, cfg.estimator.z_step_km);
  ProfileAccumulator acc(z_grid, plan);
  RunResult res;
  for (std::size_t b = 0; b < cfg.signal.blocks; ++b) {
    RxOutput rx = process_block(cfg, plan, b);
    res.unreliable_decisions = res.unreliable_decisions || rx.unreliable_decisions;
    acc.add_block(rx);
  }
  res.ppe = apply_convention(acc.finalize(ProfileKind::ppe), cfg.estimator.convention);
  res.nppe = apply_convention(acc.finalize(ProfileKind::nppe), cfg.estimator.convention);
  res.gosnr = gosnr_from_profiles(res.ppe, res.nppe, cfg.signal.baud_hz,
                                  cfg.estimator.ceiling_db, cfg.estimator.floor_db);
  res.reference_ase = analytic_ase_osnr(cfg.link, z_grid, cfg.signal.baud_hz,
                                        cfg.estimator.ceiling_db);
  if (with_nli_reference) res.reference_nli = reference_gosnr_with_nli(cfg, z_grid);
  for (auto v : res.gosnr.validity)
    if (v != PointValidity::ok) ++res.flagged_points;
  return res;
}

inline RunResult run(const ScenarioConfig& cfg, bool with_nli_reference = false,
                     bool svg = false) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult res = estimate_profiles(cfg, with_nli_reference);
  const auto t1 = std::chrono::steady_clock::now();

  namespace fs = std::filesystem;
  fs::create_directories(cfg.outputs);
  auto emit = [&](const std::string& name, const std::string& content) {
    const std::string path = (fs::path(cfg.outputs) / name).string();
    write_text_file(path, content);
    res.artifact_paths.push_back(path);
  };
  emit("ppe.csv", profile_csv(res.ppe));
  emit("nppe.csv", profile_csv(res.nppe));
  emit("gosnr.csv", gosnr_csv(res.gosnr));
  emit("reference_ase.csv", reference_csv(res.reference_ase));
  if (res.reference_nli) emit("reference_gosnr.csv", reference_csv(*res.reference_nli));

  if (svg) {
    SvgSeries est{"estimated gOSNR", "#d62728", res.gosnr.z_grid_km, res.gosnr.gosnr_db,
                  false};
    SvgSeries ase{"ASE-only reference", "#000000", res.reference_ase.z_grid_km,
                  res.reference_ase.osnr_db, true};
    std::vector<SvgSeries> series{est, ase};
    if (res.reference_nli)
      series.push_back({"ASE+NLI reference", "#1f77b4", res.reference_nli->z_grid_km,
                        res.reference_nli->osnr_db, true});
    emit("gosnr.svg", render_svg_plot(series, "z [km]", "gOSNR [dB]", cfg.name));
    SvgSeries pp{"PPE", "#2ca02c", res.ppe.z_grid_km, res.ppe.values, false};
    SvgSeries np{"NPPE", "#d62728", res.nppe.z_grid_km, res.nppe.values, false};
    emit("profiles.svg",
         render_svg_plot({pp, np}, "z [km]", "correlation", cfg.name + " profiles"));
  }

  nlohmann::json cfg_json = cfg;
  nlohmann::json seeds = nlohmann::json::array();
  for (std::size_t b = 0; b < cfg.signal.blocks; ++b) {
    const auto s = detail::block_seeds(cfg.seed, b);
    seeds.push_back({{"block", b},
                     {"symbol_seed", s.symbols},
                     {"propagation_seed", s.propagation}});
  }
  char hash_hex[17];
  std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(cfg_json.dump())));
  res.manifest = {{"config", cfg_json},
                  {"config_hash", hash_hex},
                  {"root_seed", cfg.seed},
                  {"block_seeds", seeds},
                  {"artifacts", res.artifact_paths},
                  {"library_version", kLibraryVersion},
                  {"deviations", cfg.deviations},
                  {"flagged_points", res.flagged_points},
                  {"imag_leakage",
                   {{"ppe", res.ppe.imag_leakage}, {"nppe", res.nppe.imag_leakage}}},
                  {"timings_s",
                   {{"estimate",
                     std::chrono::duration<double>(t1 - t0).count()}}}};
  const std::string manifest_path = (fs::path(cfg.outputs) / "manifest.json").string();
  write_text_file(manifest_path, res.manifest.dump(2) + "\n");
  res.artifact_paths.push_back(manifest_path);
  return res;
}

// ---- Presets ----------------------------------------------------------------

inline ScenarioConfig preset(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  c.seed = 20260826;
  c.ssfm.step_km = 1.0;
  c.estimator.z_step_km = 10.0;
  c.deviations = {"ssfm.step_km=1.0 (desk-scale; library default 0.25)",
                  "estimator.z_step_km=10 (desk-scale; library default 5)"};

  auto make_spans = [](std::size_t count, double length_km) {
    FiberSpan s;
    s.length_km = length_km;
    return std::vector<FiberSpan>(count, s);
  };
  auto line_amps = [](std::size_t span_count, std::optional<double> set_snr_db) {
    std::vector<AmplifierNode> amps;
    for (std::size_t k = 2; k <= span_count; ++k) {
      AmplifierNode a;
      a.at_span_input = k;
      if (set_snr_db) {
        a.noise_mode = NoiseMode::set_snr;
        a.set_snr_db = *set_snr_db;
      }
      amps.push_back(a);
    }
    return amps;
  };

  if (name == "single_injection") {
    c.link.spans = make_spans(6, 80.0);
    c.link.launch_power_dbm = 0.0;
    c.link.amps = line_amps(6, std::nullopt);
    NoiseInjection inj;
    inj.at_span_input = 4;
    inj.set_snr_db = 20.0;
    c.link.noise_injections = {inj};
  } else if (name == "per_span_injection") {
    c.link.spans = make_spans(6, 80.0);
    c.link.launch_power_dbm = 0.0;
    c.link.amps = line_amps(6, std::nullopt);
    for (std::size_t k = 1; k <= 6; ++k) {
      NoiseInjection inj;
      inj.at_span_input = k;
      inj.set_snr_db = 20.0;
      c.link.noise_injections.push_back(inj);
    }
  } else if (name == "cascade") {
    c.link.spans = make_spans(12, 80.0);
    c.link.launch_power_dbm = 0.0;
    c.link.amps = line_amps(12, 20.0);
    NoiseInjection inj;
    inj.at_span_input = 1;
    inj.set_snr_db = 20.0;
    c.link.noise_injections = {inj};  // booster injection so every span has one
  } else if (name == "pointloss") {
    c.link.spans = make_spans(12, 75.0);
    c.link.launch_power_dbm = 5.0;
    c.link.amps = line_amps(12, 20.0);
    NoiseInjection inj;
    inj.at_span_input = 1;
    inj.set_snr_db = 20.0;
    c.link.noise_injections = {inj};
    PointLoss pl;
    pl.after_span = 4;
    pl.loss_db = 7.0;
    c.link.point_losses = {pl};
    // The amplifier after the point loss restores 7 dB more signal; its
    // effective SNR is degraded by the same amount.
    for (auto& a : c.link.amps)
      if (a.at_span_input == 5) a.set_snr_db = 13.0;
  } else if (name == "xpm") {
    c.link.spans = make_spans(12, 75.0);
    c.link.launch_power_dbm = 5.0;
    c.link.amps = line_amps(12, 20.0);
    NoiseInjection inj;
    inj.at_span_input = 1;
    inj.set_snr_db = 20.0;
    c.link.noise_injections = {inj};
    for (int k = 0; k < 4; ++k) {
      WdmNeighbor nb;
      const int slot = (k / 2 + 1) * (k % 2 == 0 ? 1 : -1);  // +1,-1,+2,-2
      nb.center_offset_hz = 75e9 * slot;
      nb.power_dbm = -10.0;
      nb.seed = 7000 + k;
      c.link.wdm_neighbors.push_back(nb);
    }
    c.signal.samples_per_symbol = 6;
    c.signal.symbols_per_block = 1u << 14;
    c.signal.blocks = 8;
    c.deviations.push_back("wdm neighbors desk-scaled to 4 (not 20)");
    c.deviations.push_back("symbols_per_block=2^14, blocks=8 (desk-scale)");
  } else {
    throw config_error("unknown preset: " + name);
  }
  return c;
}

inline std::vector<std::string> preset_names() {
  return {"single_injection", "per_span_injection", "cascade", "pointloss", "xpm"};
}

}  // namespace linkprof
