#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "linkprof/common.hpp"

namespace linkprof {

struct FiberSpan {
  double length_km = 80.0;
  double alpha_db_per_km = 0.2;
  double dispersion_D_ps_nm_km = 17.0;
  double gamma_per_w_km = 1.3;
  double reference_wavelength_nm = 1550.0;
};

enum class NoiseMode { none, set_snr, noise_figure };

struct AmplifierNode {
  std::size_t at_span_input = 1;  // 1-based span index; gain applied before that span
  bool gain_auto = true;          // restore launch power when true
  double gain_db = 0.0;
  NoiseMode noise_mode = NoiseMode::none;
  double set_snr_db = 0.0;
  double noise_figure_db = 0.0;
};

struct PointLoss {
  std::size_t after_span = 1;  // 1-based
  double loss_db = 0.0;
};

struct NoiseInjection {
  std::size_t at_span_input = 1;  // 1-based; injected before that span (after any amp)
  // Either an SNR relative to the signal power at the node, or absolute power.
  std::optional<double> set_snr_db;
  std::optional<double> power_mw;  // in-band power
};

struct WdmNeighbor {
  double center_offset_hz = 0.0;
  double power_dbm = 0.0;
  std::uint64_t seed = 0;
};

struct LinkSpec {
  std::vector<FiberSpan> spans;
  std::vector<AmplifierNode> amps;
  std::vector<PointLoss> point_losses;
  std::vector<NoiseInjection> noise_injections;
  double launch_power_dbm = 0.0;
  std::vector<WdmNeighbor> wdm_neighbors;

  double total_length_km() const {
    double l = 0.0;
    for (const auto& s : spans) l += s.length_km;
    return l;
  }
};

// One executable step of a compiled link.
struct PlanStep {
  enum class Kind { segment, gain, loss, noise } kind = Kind::segment;
  double start_z_km = 0.0;
  // segment
  double length_km = 0.0;
  double alpha_db_per_km = 0.0;
  double beta2_ps2_per_km = 0.0;
  double gamma_per_w_km = 0.0;
  // gain / loss
  double db = 0.0;
  // noise: power within the signal baud bandwidth, mW; the engine scales the
  // injected white noise by (sample_rate/baud) so in-band SNR matches.
  double noise_in_band_mw = 0.0;
};

struct PropagationPlan {
  std::vector<PlanStep> steps;
  double total_length_km = 0.0;
  // Piecewise-linear cumulative beta2 map: nodes (z_km, B_ps2).
  std::vector<std::pair<double, double>> beta2_nodes;

  double cumulative_beta2_ps2(double z_km) const {
    if (z_km < -1e-9 || z_km > total_length_km + 1e-9)
      throw invalid_argument_error("cumulative_beta2: z outside [0, L]");
    z_km = std::min(std::max(z_km, 0.0), total_length_km);
    for (std::size_t i = 1; i < beta2_nodes.size(); ++i) {
      if (z_km <= beta2_nodes[i].first + 1e-12) {
        const auto& [z0, b0] = beta2_nodes[i - 1];
        const auto& [z1, b1] = beta2_nodes[i];
        if (z1 == z0) return b1;
        return b0 + (b1 - b0) * (z_km - z0) / (z1 - z0);
      }
    }
    return beta2_nodes.empty() ? 0.0 : beta2_nodes.back().second;
  }
};

inline PropagationPlan compile(const LinkSpec& spec) {
  if (spec.spans.empty()) throw invalid_argument_error("compile: link has no spans");
  for (const auto& s : spec.spans) {
    if (s.length_km <= 0.0) throw invalid_argument_error("compile: span length must be > 0");
    if (s.alpha_db_per_km < 0.0) throw invalid_argument_error("compile: alpha must be >= 0");
    if (s.gamma_per_w_km < 0.0) throw invalid_argument_error("compile: gamma must be >= 0");
  }
  for (const auto& p : spec.point_losses)
    if (p.loss_db < 0.0) throw invalid_argument_error("compile: point loss must be >= 0");

  PropagationPlan plan;
  plan.beta2_nodes.push_back({0.0, 0.0});
  double z = 0.0;
  double signal_dbm = spec.launch_power_dbm;  // after the z=0 booster

  auto add_noise_step = [&](double snr_db) {
    PlanStep n;
    n.kind = PlanStep::Kind::noise;
    n.start_z_km = z;
    if (snr_db <= 0.0) throw invalid_argument_error("compile: set_snr must be > 0 dB");
    n.noise_in_band_mw = dbm_to_mw(signal_dbm) / db_to_lin(snr_db);
    plan.steps.push_back(n);
  };

  for (std::size_t si = 1; si <= spec.spans.size(); ++si) {
    // Amplifier at this span input (none at span 1 unless declared: the z=0
    // booster that sets the launch power is implicit in set_average_power).
    for (const auto& a : spec.amps) {
      if (a.at_span_input != si) continue;
      PlanStep g;
      g.kind = PlanStep::Kind::gain;
      g.start_z_km = z;
      g.db = a.gain_auto ? (spec.launch_power_dbm - signal_dbm) : a.gain_db;
      if (!std::isfinite(g.db)) throw invalid_argument_error("compile: non-finite gain");
      signal_dbm += g.db;
      plan.steps.push_back(g);
      if (a.noise_mode == NoiseMode::set_snr) {
        add_noise_step(a.set_snr_db);
      } else if (a.noise_mode == NoiseMode::noise_figure) {
        // P_ase = NF * h * nu * (G-1) * B_ref, both polarizations.
        const double nu = kSpeedOfLight_m_s / (spec.spans[si - 1].reference_wavelength_nm * 1e-9);
        const double g_lin = db_to_lin(g.db);
        const double p_w = db_to_lin(a.noise_figure_db) * kPlanck_J_s * nu *
                           std::max(g_lin - 1.0, 0.0) * kOsnrRefBandwidth_hz;
        PlanStep n;
        n.kind = PlanStep::Kind::noise;
        n.start_z_km = z;
        n.noise_in_band_mw = p_w * 1e3;
        plan.steps.push_back(n);
      }
    }
    for (const auto& inj : spec.noise_injections) {
      if (inj.at_span_input != si) continue;
      if (inj.power_mw) {
        PlanStep n;
        n.kind = PlanStep::Kind::noise;
        n.start_z_km = z;
        n.noise_in_band_mw = *inj.power_mw;
        plan.steps.push_back(n);
      } else if (inj.set_snr_db) {
        add_noise_step(*inj.set_snr_db);
      } else {
        throw invalid_argument_error("compile: noise injection needs set_snr_db or power_mw");
      }
    }
    const FiberSpan& s = spec.spans[si - 1];
    PlanStep seg;
    seg.kind = PlanStep::Kind::segment;
    seg.start_z_km = z;
    seg.length_km = s.length_km;
    seg.alpha_db_per_km = s.alpha_db_per_km;
    seg.beta2_ps2_per_km = beta2_ps2_km_from_D(s.dispersion_D_ps_nm_km, s.reference_wavelength_nm);
    seg.gamma_per_w_km = s.gamma_per_w_km;
    plan.steps.push_back(seg);
    z += s.length_km;
    signal_dbm -= s.alpha_db_per_km * s.length_km;
    plan.beta2_nodes.push_back({z, plan.beta2_nodes.back().second +
                                       seg.beta2_ps2_per_km * s.length_km});
    for (const auto& p : spec.point_losses) {
      if (p.after_span != si) continue;
      PlanStep l;
      l.kind = PlanStep::Kind::loss;
      l.start_z_km = z;
      l.db = p.loss_db;
      plan.steps.push_back(l);
      signal_dbm -= p.loss_db;
    }
  }
  plan.total_length_km = z;
  return plan;
}

// ---- JSON (de)serialization of LinkSpec -----------------------------------

inline void to_json(nlohmann::json& j, const FiberSpan& s) {
  j = {{"length_km", s.length_km},
       {"alpha_db_per_km", s.alpha_db_per_km},
       {"dispersion_ps_nm_km", s.dispersion_D_ps_nm_km},
       {"gamma_per_w_km", s.gamma_per_w_km},
       {"reference_wavelength_nm", s.reference_wavelength_nm}};
}

inline void from_json(const nlohmann::json& j, FiberSpan& s) {
  s.length_km = j.value("length_km", 80.0);
  s.alpha_db_per_km = j.value("alpha_db_per_km", 0.2);
  s.dispersion_D_ps_nm_km = j.value("dispersion_ps_nm_km", 17.0);
  s.gamma_per_w_km = j.value("gamma_per_w_km", 1.3);
  s.reference_wavelength_nm = j.value("reference_wavelength_nm", 1550.0);
}

inline void to_json(nlohmann::json& j, const AmplifierNode& a) {
  j = {{"at_span_input", a.at_span_input}};
  if (a.gain_auto)
    j["gain_db"] = "auto";
  else
    j["gain_db"] = a.gain_db;
  switch (a.noise_mode) {
    case NoiseMode::none: j["noise"] = "none"; break;
    case NoiseMode::set_snr: j["noise"] = {{"set_snr_db", a.set_snr_db}}; break;
    case NoiseMode::noise_figure: j["noise"] = {{"noise_figure_db", a.noise_figure_db}}; break;
  }
}

inline void from_json(const nlohmann::json& j, AmplifierNode& a) {
  a.at_span_input = j.at("at_span_input").get<std::size_t>();
  if (j.contains("gain_db") && j["gain_db"].is_number()) {
    a.gain_auto = false;
    a.gain_db = j["gain_db"].get<double>();
  } else {
    a.gain_auto = true;
  }
  a.noise_mode = NoiseMode::none;
  if (j.contains("noise") && j["noise"].is_object()) {
    const auto& n = j["noise"];
    if (n.contains("set_snr_db")) {
      a.noise_mode = NoiseMode::set_snr;
      a.set_snr_db = n["set_snr_db"].get<double>();
    } else if (n.contains("noise_figure_db")) {
      a.noise_mode = NoiseMode::noise_figure;
      a.noise_figure_db = n["noise_figure_db"].get<double>();
    }
  }
}

inline void to_json(nlohmann::json& j, const PointLoss& p) {
  j = {{"after_span", p.after_span}, {"loss_db", p.loss_db}};
}

inline void from_json(const nlohmann::json& j, PointLoss& p) {
  p.after_span = j.at("after_span").get<std::size_t>();
  p.loss_db = j.at("loss_db").get<double>();
}

inline void to_json(nlohmann::json& j, const NoiseInjection& n) {
  j = {{"at_span_input", n.at_span_input}};
  if (n.set_snr_db) j["set_snr_db"] = *n.set_snr_db;
  if (n.power_mw) j["power_mw"] = *n.power_mw;
}

inline void from_json(const nlohmann::json& j, NoiseInjection& n) {
  n.at_span_input = j.at("at_span_input").get<std::size_t>();
  if (j.contains("set_snr_db")) n.set_snr_db = j["set_snr_db"].get<double>();
  if (j.contains("power_mw")) n.power_mw = j["power_mw"].get<double>();
}

inline void to_json(nlohmann::json& j, const WdmNeighbor& w) {
  j = {{"center_offset_hz", w.center_offset_hz},
       {"power_dbm", w.power_dbm},
       {"seed", w.seed}};
}

inline void from_json(const nlohmann::json& j, WdmNeighbor& w) {
  w.center_offset_hz = j.at("center_offset_hz").get<double>();
  w.power_dbm = j.at("power_dbm").get<double>();
  w.seed = j.value("seed", std::uint64_t{0});
}

inline void to_json(nlohmann::json& j, const LinkSpec& s) {
  j = {{"spans", s.spans},
       {"amps", s.amps},
       {"point_losses", s.point_losses},
       {"noise_injections", s.noise_injections},
       {"launch_power_dbm", s.launch_power_dbm},
       {"wdm_neighbors", s.wdm_neighbors}};
}

inline void from_json(const nlohmann::json& j, LinkSpec& s) {
  // "spans" entries may carry "count" to repeat identical spans.
  s.spans.clear();
  for (const auto& sj : j.at("spans")) {
    FiberSpan span = sj.get<FiberSpan>();
    const std::size_t count = sj.value("count", std::size_t{1});
    for (std::size_t i = 0; i < count; ++i) s.spans.push_back(span);
  }
  s.amps = j.value("amps", std::vector<AmplifierNode>{});
  s.point_losses = j.value("point_losses", std::vector<PointLoss>{});
  s.noise_injections = j.value("noise_injections", std::vector<NoiseInjection>{});
  s.launch_power_dbm = j.value("launch_power_dbm", 0.0);
  s.wdm_neighbors = j.value("wdm_neighbors", std::vector<WdmNeighbor>{});
}

}  // namespace linkprof
