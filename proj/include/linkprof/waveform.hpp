#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "linkprof/common.hpp"
#include "linkprof/fft.hpp"
#include "linkprof/rng.hpp"

namespace linkprof {

// Modulation symbols plus baud rate. QPSK points are (±1±j)/√2 exactly.
struct SymbolFrame {
  std::vector<std::vector<cplx>> symbols;  // [pol][k]
  double baud_rate_hz = 0.0;
  std::uint64_t seed = 0;

  std::size_t pol_count() const { return symbols.size(); }
  std::size_t size() const { return symbols.empty() ? 0 : symbols[0].size(); }
};

// Sampled complex baseband field. Amplitudes are in √mW, so |sample|^2 is an
// instantaneous power in mW.
struct ComplexWaveform {
  std::vector<std::vector<cplx>> pol;  // [pol][n]
  double sample_rate_hz = 0.0;
  double center_offset_hz = 0.0;

  std::size_t pol_count() const { return pol.size(); }
  std::size_t size() const { return pol.empty() ? 0 : pol[0].size(); }
};

inline SymbolFrame generate_symbols(std::size_t count, std::size_t pol_count,
                                    std::uint64_t seed) {
  if (count < 1) throw invalid_argument_error("generate_symbols: count must be >= 1");
  if (pol_count != 1 && pol_count != 2)
    throw invalid_argument_error("generate_symbols: pol_count must be 1 or 2");
  SymbolFrame f;
  f.seed = seed;
  f.symbols.resize(pol_count);
  const double h = std::sqrt(0.5);
  for (std::size_t p = 0; p < pol_count; ++p) {
    Rng rng(derive_seed(seed, p));
    f.symbols[p].resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      const std::uint64_t b = rng.bits();
      f.symbols[p][k] = {(b & 1) ? h : -h, (b & 2) ? h : -h};
    }
  }
  return f;
}

// Root-raised-cosine amplitude response on the DFT grid. f in Hz, baud in Hz.
inline double rrc_response(double f_hz, double baud_hz, double rolloff) {
  const double t = 1.0 / baud_hz;
  const double af = std::abs(f_hz);
  const double f1 = (1.0 - rolloff) / (2.0 * t);
  const double f2 = (1.0 + rolloff) / (2.0 * t);
  if (af <= f1) return 1.0;
  if (af >= f2) return 0.0;
  const double arg = kPi * t / std::max(rolloff, 1e-300) * (af - f1);
  return std::cos(0.5 * arg);
}

// Pulse-shape a symbol frame with a root-raised-cosine filter applied on the
// DFT grid (circular), then normalize the average total power to 1 mW.
// Circular filtering keeps the raised-cosine Nyquist property exact, so a
// matched filter recovers the symbols with no ISI.
inline ComplexWaveform shape_pulse(const SymbolFrame& frame, double rolloff,
                                   std::size_t samples_per_symbol) {
  if (rolloff < 0.0 || rolloff > 1.0)
    throw invalid_argument_error("shape_pulse: rolloff must be in [0,1]");
  if (samples_per_symbol < 2)
    throw invalid_argument_error("shape_pulse: samples_per_symbol must be >= 2");
  if (frame.size() == 0) throw invalid_argument_error("shape_pulse: empty frame");
  ComplexWaveform w;
  w.sample_rate_hz = frame.baud_rate_hz * static_cast<double>(samples_per_symbol);
  const std::size_t n = frame.size() * samples_per_symbol;
  w.pol.resize(frame.pol_count());
  double total_power = 0.0;
  for (std::size_t p = 0; p < frame.pol_count(); ++p) {
    std::vector<cplx> x(n, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < frame.size(); ++k)
      x[k * samples_per_symbol] = frame.symbols[p][k];
    fft_forward(x);
    for (std::size_t k = 0; k < n; ++k)
      x[k] *= rrc_response(bin_frequency_hz(k, n, w.sample_rate_hz),
                           frame.baud_rate_hz, rolloff);
    fft_inverse(x);
    for (const auto& v : x) total_power += std::norm(v);
    w.pol[p] = std::move(x);
  }
  const double mean_power = total_power / static_cast<double>(n);
  if (mean_power <= 0.0) throw invalid_argument_error("shape_pulse: zero-energy frame");
  const double scale = 1.0 / std::sqrt(mean_power);
  for (auto& pol : w.pol)
    for (auto& v : pol) v *= scale;
  return w;
}

// Time-mean of the total instantaneous power (summed over polarizations), mW.
inline double average_power_mw(const ComplexWaveform& w) {
  if (w.size() == 0) throw invalid_argument_error("average_power: empty waveform");
  double acc = 0.0;
  for (const auto& pol : w.pol)
    for (const auto& v : pol) acc += std::norm(v);
  return acc / static_cast<double>(w.size());
}

inline ComplexWaveform set_average_power(const ComplexWaveform& w, double p_dbm) {
  const double cur = average_power_mw(w);
  if (cur <= 0.0) throw invalid_argument_error("set_average_power: zero waveform");
  ComplexWaveform out = w;
  const double scale = std::sqrt(dbm_to_mw(p_dbm) / cur);
  for (auto& pol : out.pol)
    for (auto& v : pol) v *= scale;
  return out;
}

// White circularly-symmetric complex Gaussian noise matching the shape of
// `shape_of`, with the given total power split equally across polarizations.
inline ComplexWaveform generate_awgn(const ComplexWaveform& shape_of,
                                     double total_power_mw, std::uint64_t seed) {
  if (total_power_mw < 0.0)
    throw invalid_argument_error("generate_awgn: negative power");
  ComplexWaveform w;
  w.sample_rate_hz = shape_of.sample_rate_hz;
  w.center_offset_hz = shape_of.center_offset_hz;
  w.pol.resize(shape_of.pol_count());
  const double per_pol = total_power_mw / static_cast<double>(shape_of.pol_count());
  for (std::size_t p = 0; p < shape_of.pol_count(); ++p) {
    Rng rng(derive_seed(seed, p));
    w.pol[p].resize(shape_of.size());
    for (auto& v : w.pol[p]) v = rng.complex_gaussian(per_pol);
  }
  return w;
}

inline void add_in_place(ComplexWaveform& w, const ComplexWaveform& other) {
  if (w.pol_count() != other.pol_count() || w.size() != other.size())
    throw invalid_argument_error("add_in_place: shape mismatch");
  for (std::size_t p = 0; p < w.pol_count(); ++p)
    for (std::size_t k = 0; k < w.size(); ++k) w.pol[p][k] += other.pol[p][k];
}

// Brick-wall filter: keep |f - center| <= bandwidth/2, zero elsewhere.
inline ComplexWaveform band_limit(const ComplexWaveform& w, double center_hz,
                                  double bandwidth_hz) {
  ComplexWaveform out = w;
  const std::size_t n = w.size();
  for (auto& pol : out.pol) {
    fft_forward(pol);
    for (std::size_t k = 0; k < n; ++k) {
      const double f = bin_frequency_hz(k, n, w.sample_rate_hz);
      if (std::abs(f - center_hz) > bandwidth_hz / 2.0) pol[k] = 0.0;
    }
    fft_inverse(pol);
  }
  return out;
}

// Matched RRC filter followed by decimation at the symbol centers.
inline SymbolFrame matched_filter_decimate(const ComplexWaveform& w, double baud_hz,
                                           double rolloff,
                                           std::size_t samples_per_symbol) {
  if (w.size() % samples_per_symbol != 0)
    throw invalid_argument_error("matched_filter: length not a multiple of sps");
  SymbolFrame f;
  f.baud_rate_hz = baud_hz;
  f.symbols.resize(w.pol_count());
  const std::size_t n = w.size();
  for (std::size_t p = 0; p < w.pol_count(); ++p) {
    std::vector<cplx> x = w.pol[p];
    fft_forward(x);
    for (std::size_t k = 0; k < n; ++k)
      x[k] *= rrc_response(bin_frequency_hz(k, n, w.sample_rate_hz), baud_hz, rolloff);
    fft_inverse(x);
    const std::size_t count = n / samples_per_symbol;
    f.symbols[p].resize(count);
    for (std::size_t k = 0; k < count; ++k)
      f.symbols[p][k] = x[k * samples_per_symbol];
  }
  return f;
}

}  // namespace linkprof
