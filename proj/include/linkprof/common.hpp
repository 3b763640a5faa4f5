#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace linkprof {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight_m_s = 299792458.0;
inline constexpr double kPlanck_J_s = 6.62607015e-34;
inline constexpr double kPi = 3.14159265358979323846;
// OSNR reference bandwidth (0.1 nm at 1550 nm).
inline constexpr double kOsnrRefBandwidth_hz = 12.5e9;

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

// Power attenuation coefficient in nepers/km from dB/km.
inline double alpha_np_per_km(double alpha_db_per_km) {
  return alpha_db_per_km * std::log(10.0) / 10.0;
}

// beta2 in ps^2/km from D in ps/nm/km at wavelength lambda_nm.
inline double beta2_ps2_km_from_D(double d_ps_nm_km, double lambda_nm) {
  const double lambda_m = lambda_nm * 1e-9;
  const double d_si = d_ps_nm_km * 1e-6;  // s/m^2
  const double beta2_si = -d_si * lambda_m * lambda_m / (2.0 * kPi * kSpeedOfLight_m_s);
  return beta2_si * 1e24 * 1e3;  // s^2/m -> ps^2/km
}

struct invalid_argument_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace linkprof
