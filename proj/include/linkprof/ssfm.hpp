#pragma once

#include <cmath>
#include <vector>

#include "linkprof/common.hpp"
#include "linkprof/fft.hpp"
#include "linkprof/link.hpp"
#include "linkprof/rng.hpp"
#include "linkprof/waveform.hpp"

namespace linkprof {

struct SsfmConfig {
  double step_km = 0.25;
  bool manakov = true;  // 8/9 factor; scalar NLSE when false or single pol
  // Baud rate of the signal the set-SNR noise injections are referenced to.
  // Injected white noise over the full simulated band is scaled by
  // (sample_rate / signal_baud_hz) so the in-band SNR matches the set value.
  double signal_baud_hz = 68e9;
};

// Frequency-domain CD operator: multiply by exp(+j*(B/2)*omega^2) with B the
// accumulated beta2 in ps^2, under the convention
// dE/dz = -j*(beta2/2) d^2E/dt^2 - (alpha/2) E - j*gamma*|E|^2 E.
inline ComplexWaveform dispersion_step(const ComplexWaveform& w, double beta2_total_ps2) {
  ComplexWaveform out = w;
  if (beta2_total_ps2 == 0.0) return out;
  const std::size_t n = w.size();
  const double b_s2 = beta2_total_ps2 * 1e-24;
  for (auto& pol : out.pol) {
    fft_forward(pol);
    for (std::size_t k = 0; k < n; ++k) {
      const double omega = 2.0 * kPi * bin_frequency_hz(k, n, w.sample_rate_hz);
      const double phase = 0.5 * b_s2 * omega * omega;
      pol[k] *= cplx{std::cos(phase), std::sin(phase)};
    }
    fft_inverse(pol);
  }
  return out;
}

// Kerr phase rotation exp(-j*gamma_eff*P_tot(t)*L_eff) with P_tot in W summed
// over polarizations and gamma_eff = (8/9)*gamma in Manakov mode.
inline ComplexWaveform nonlinear_step(const ComplexWaveform& w, double gamma_per_w_km,
                                      double effective_km, bool manakov) {
  if (effective_km < 0.0)
    throw invalid_argument_error("nonlinear_step: negative effective length");
  ComplexWaveform out = w;
  if (gamma_per_w_km == 0.0 || effective_km == 0.0) return out;
  const double g_eff = (manakov && w.pol_count() == 2) ? gamma_per_w_km * 8.0 / 9.0
                                                       : gamma_per_w_km;
  const std::size_t n = w.size();
  for (std::size_t k = 0; k < n; ++k) {
    double p_mw = 0.0;
    for (const auto& pol : w.pol) p_mw += std::norm(pol[k]);
    const double phase = -g_eff * (p_mw * 1e-3) * effective_km;
    const cplx rot{std::cos(phase), std::sin(phase)};
    for (auto& pol : out.pol) pol[k] *= rot;
  }
  return out;
}

namespace detail {

inline void apply_scalar(ComplexWaveform& w, double amp_factor) {
  for (auto& pol : w.pol)
    for (auto& v : pol) v *= amp_factor;
}

// Symmetric split-step over one fiber segment, in place.
inline void propagate_segment(ComplexWaveform& w, const PlanStep& seg,
                              const SsfmConfig& cfg) {
  if (cfg.step_km <= 0.0) throw config_error("ssfm: step_km must be > 0");
  if (cfg.step_km > seg.length_km + 1e-12)
    throw config_error("ssfm: step_km exceeds span length");
  const std::size_t nsteps =
      static_cast<std::size_t>(std::ceil(seg.length_km / cfg.step_km - 1e-9));
  const double dz = seg.length_km / static_cast<double>(nsteps);
  const double alpha_np = alpha_np_per_km(seg.alpha_db_per_km);
  const double l_eff = (alpha_np > 0.0) ? (1.0 - std::exp(-alpha_np * dz)) / alpha_np : dz;
  const double amp_factor = std::exp(-0.5 * alpha_np * dz);
  const std::size_t n = w.size();
  const double b_half_s2 = seg.beta2_ps2_per_km * dz * 0.5 * 1e-24;

  std::vector<cplx> half_phase(n), full_phase(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double omega = 2.0 * kPi * bin_frequency_hz(k, n, w.sample_rate_hz);
    const double ph = 0.5 * b_half_s2 * omega * omega;
    half_phase[k] = cplx{std::cos(ph), std::sin(ph)};
    full_phase[k] = cplx{std::cos(2.0 * ph), std::sin(2.0 * ph)};
  }

  // D(dz/2) [NL, loss, D(dz)]^(nsteps-1) NL, loss, D(dz/2): consecutive
  // half-dispersion steps are merged.
  for (auto& pol : w.pol) {
    fft_forward(pol);
    for (std::size_t k = 0; k < n; ++k) pol[k] *= half_phase[k];
    fft_inverse(pol);
  }
  for (std::size_t step = 0; step < nsteps; ++step) {
    w = nonlinear_step(w, seg.gamma_per_w_km, l_eff, cfg.manakov);
    apply_scalar(w, amp_factor);
    const bool last = (step + 1 == nsteps);
    const auto& phase = last ? half_phase : full_phase;
    for (auto& pol : w.pol) {
      fft_forward(pol);
      for (std::size_t k = 0; k < n; ++k) pol[k] *= phase[k];
      fft_inverse(pol);
    }
  }
}

}  // namespace detail

// Propagate a waveform through a compiled plan. Deterministic given the seed:
// ASE injections consume one derived stream per noise step, in element order.
inline ComplexWaveform propagate(const ComplexWaveform& w, const PropagationPlan& plan,
                                 const SsfmConfig& cfg, std::uint64_t seed) {
  ComplexWaveform out = w;
  std::uint64_t noise_index = 0;
  for (const auto& step : plan.steps) {
    switch (step.kind) {
      case PlanStep::Kind::segment:
        detail::propagate_segment(out, step, cfg);
        break;
      case PlanStep::Kind::gain:
        detail::apply_scalar(out, std::pow(10.0, step.db / 20.0));
        break;
      case PlanStep::Kind::loss:
        detail::apply_scalar(out, std::pow(10.0, -step.db / 20.0));
        break;
      case PlanStep::Kind::noise: {
        const double full_band_mw =
            step.noise_in_band_mw * (w.sample_rate_hz / cfg.signal_baud_hz);
        if (full_band_mw > 0.0) {
          add_in_place(out, generate_awgn(out, full_band_mw,
                                          derive_seed(seed, 0xA5E0 + noise_index)));
        }
        ++noise_index;
        break;
      }
    }
  }
  return out;
}

namespace detail {

// Circularly move spectrum content at bin k to bin k+shift.
inline std::vector<cplx> spectrum_shift(const std::vector<cplx>& x, long shift) {
  const long n = static_cast<long>(x.size());
  std::vector<cplx> out(x.size());
  const long s = ((shift % n) + n) % n;
  for (long k = 0; k < n; ++k) out[(k + s) % n] = x[k];
  return out;
}

}  // namespace detail

// Sum of channels shifted to their center offsets (offsets snapped to the DFT
// bin grid). All channels must share sample rate and length.
inline ComplexWaveform wdm_multiplex(
    const std::vector<std::pair<ComplexWaveform, double>>& channels) {
  if (channels.empty()) throw invalid_argument_error("wdm_multiplex: no channels");
  const auto& first = channels.front().first;
  const std::size_t n = first.size();
  const double fs = first.sample_rate_hz;
  ComplexWaveform out;
  out.sample_rate_hz = fs;
  out.pol.assign(first.pol_count(), std::vector<cplx>(n, cplx{0.0, 0.0}));
  for (const auto& [ch, offset] : channels) {
    if (ch.size() != n || ch.pol_count() != first.pol_count() ||
        ch.sample_rate_hz != fs)
      throw invalid_argument_error("wdm_multiplex: channel shape mismatch");
    if (std::abs(offset) > fs / 2.0)
      throw config_error("wdm_multiplex: channel offset outside simulated band");
    const long shift = std::lround(offset / (fs / static_cast<double>(n)));
    for (std::size_t p = 0; p < ch.pol_count(); ++p) {
      std::vector<cplx> x = ch.pol[p];
      fft_forward(x);
      x = detail::spectrum_shift(x, shift);
      fft_inverse(x);
      for (std::size_t k = 0; k < n; ++k) out.pol[p][k] += x[k];
    }
  }
  return out;
}

// Brick-wall select a channel at `offset` with width `bandwidth`, shifted back
// to baseband.
inline ComplexWaveform channel_select(const ComplexWaveform& w, double offset_hz,
                                      double bandwidth_hz) {
  if (std::abs(offset_hz) + bandwidth_hz / 2.0 > w.sample_rate_hz / 2.0)
    throw config_error("channel_select: band outside simulated spectrum");
  const std::size_t n = w.size();
  const double df = w.sample_rate_hz / static_cast<double>(n);
  const long shift = std::lround(offset_hz / df);
  ComplexWaveform out = w;
  out.center_offset_hz = 0.0;
  for (auto& pol : out.pol) {
    fft_forward(pol);
    pol = detail::spectrum_shift(pol, -shift);
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(bin_frequency_hz(k, n, w.sample_rate_hz)) > bandwidth_hz / 2.0)
        pol[k] = 0.0;
    }
    fft_inverse(pol);
  }
  return out;
}

}  // namespace linkprof
