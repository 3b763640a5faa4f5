#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "linkprof/common.hpp"
#include "linkprof/correlation.hpp"
#include "linkprof/link.hpp"

namespace linkprof {

enum class PointValidity { ok, clamped, ratio_le_one };

inline const char* validity_name(PointValidity v) {
  switch (v) {
    case PointValidity::ok: return "ok";
    case PointValidity::clamped: return "clamped";
    case PointValidity::ratio_le_one: return "ratio<=1";
  }
  return "?";
}

struct GosnrProfile {
  std::vector<double> z_grid_km;
  std::vector<double> gosnr_db;
  std::vector<PointValidity> validity;
  double r_factor = 0.0;  // f_baud / 12.5 GHz
  double f_baud_hz = 0.0;
  double ceiling_db = 40.0;
  double floor_db = -10.0;
};

struct ReferenceProfile {
  std::vector<double> z_grid_km;
  std::vector<double> osnr_db;
  std::string includes;  // "ase" or "ase,nli"
};

// gOSNR(z) = R / (NPPE(z)/PPE(z) - 1), in dB. Points with a non-positive PPE
// value or ratio <= 1 carry no numeric guarantee and are clamped + flagged.
inline GosnrProfile gosnr_from_profiles(const CorrelationProfile& ppe,
                                        const CorrelationProfile& nppe,
                                        double f_baud_hz, double ceiling_db = 40.0,
                                        double floor_db = -10.0) {
  if (ppe.z_grid_km != nppe.z_grid_km)
    throw invalid_argument_error("gosnr_from_profiles: z grid mismatch");
  GosnrProfile g;
  g.z_grid_km = ppe.z_grid_km;
  g.f_baud_hz = f_baud_hz;
  g.r_factor = f_baud_hz / kOsnrRefBandwidth_hz;
  g.ceiling_db = ceiling_db;
  g.floor_db = floor_db;
  g.gosnr_db.resize(g.z_grid_km.size());
  g.validity.resize(g.z_grid_km.size());
  for (std::size_t i = 0; i < g.z_grid_km.size(); ++i) {
    const double p = ppe.values[i];
    const double n = nppe.values[i];
    if (p <= 0.0 || n / p <= 1.0) {
      g.gosnr_db[i] = ceiling_db;
      g.validity[i] = PointValidity::ratio_le_one;
      continue;
    }
    const double val = lin_to_db(g.r_factor / (n / p - 1.0));
    if (val > ceiling_db) {
      g.gosnr_db[i] = ceiling_db;
      g.validity[i] = PointValidity::clamped;
    } else if (val < floor_db) {
      g.gosnr_db[i] = floor_db;
      g.validity[i] = PointValidity::clamped;
    } else {
      g.gosnr_db[i] = val;
      g.validity[i] = PointValidity::ok;
    }
  }
  return g;
}

// ASE-only reference: accumulated 1/SNR over the set-SNR injections at or
// before each grid point, converted to OSNR via R. Requires every noisy
// amplifier to be in set_snr mode.
inline ReferenceProfile analytic_ase_osnr(const LinkSpec& spec,
                                          const std::vector<double>& z_grid_km,
                                          double f_baud_hz, double ceiling_db = 40.0) {
  for (const auto& a : spec.amps)
    if (a.noise_mode == NoiseMode::noise_figure)
      throw invalid_argument_error(
          "analytic_ase_osnr: noise_figure amps unsupported; use the SNR oracle");
  // Injection positions and linear 1/SNR contributions.
  std::vector<std::pair<double, double>> inv_snr_at;  // (z_km, 1/snr)
  double z = 0.0;
  for (std::size_t si = 1; si <= spec.spans.size(); ++si) {
    for (const auto& a : spec.amps)
      if (a.at_span_input == si && a.noise_mode == NoiseMode::set_snr)
        inv_snr_at.push_back({z, 1.0 / db_to_lin(a.set_snr_db)});
    for (const auto& inj : spec.noise_injections)
      if (inj.at_span_input == si && inj.set_snr_db)
        inv_snr_at.push_back({z, 1.0 / db_to_lin(*inj.set_snr_db)});
    z += spec.spans[si - 1].length_km;
  }
  const double r = f_baud_hz / kOsnrRefBandwidth_hz;
  ReferenceProfile ref;
  ref.includes = "ase";
  ref.z_grid_km = z_grid_km;
  ref.osnr_db.resize(z_grid_km.size());
  for (std::size_t i = 0; i < z_grid_km.size(); ++i) {
    double inv = 0.0;
    for (const auto& [zi, v] : inv_snr_at)
      if (zi <= z_grid_km[i] + 1e-9) inv += v;
    ref.osnr_db[i] = (inv > 0.0) ? lin_to_db(r / inv) : ceiling_db;
    if (ref.osnr_db[i] > ceiling_db) ref.osnr_db[i] = ceiling_db;
  }
  return ref;
}

}  // namespace linkprof
