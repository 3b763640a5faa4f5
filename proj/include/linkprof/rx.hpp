#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "linkprof/common.hpp"
#include "linkprof/link.hpp"
#include "linkprof/ssfm.hpp"
#include "linkprof/waveform.hpp"

namespace linkprof {

// Receiver-plane decomposition of the received field: everything is referenced
// to z = 0 after full CD compensation. e_tot_0 is normalized so that the
// least-squares fit of u_ref onto it equals 1, hence
// delta_e = e_tot_0 - u_ref sample-wise.
struct RxOutput {
  ComplexWaveform e_tot_0;
  ComplexWaveform u_ref;   // unit average total power
  ComplexWaveform delta_e;
  cplx fit_scale{1.0, 0.0};  // after normalization (== 1 up to rounding)
  cplx raw_scale{0.0, 0.0};  // LS alignment of u_ref against the unnormalized field
  double decision_error_rate = 0.0;
  bool unreliable_decisions = false;
};

inline ComplexWaveform compensate_dispersion(const ComplexWaveform& w,
                                             const PropagationPlan& plan) {
  return dispersion_step(w, -plan.cumulative_beta2_ps2(plan.total_length_km));
}

struct DemodResult {
  SymbolFrame decided;
  double error_rate = 0.0;
  bool unreliable = false;
};

namespace detail {

inline cplx nearest_qpsk(cplx v) {
  const double h = std::sqrt(0.5);
  return {v.real() >= 0.0 ? h : -h, v.imag() >= 0.0 ? h : -h};
}

}  // namespace detail

// Matched filter, decimate, align phase/scale, hard QPSK decisions.
// With a frame hint (genie mode) the alignment uses the first 1024 known
// symbols and the decision error rate is measured against the hint; without
// one, blind 4th-power phase alignment is used (pi/2 ambiguity is irrelevant
// downstream: a rotated reference is absorbed by the LS fit scale).
inline DemodResult demodulate(const ComplexWaveform& w0,
                              const std::optional<SymbolFrame>& frame_hint,
                              double baud_hz, double rolloff,
                              std::size_t samples_per_symbol) {
  SymbolFrame rx = matched_filter_decimate(w0, baud_hz, rolloff, samples_per_symbol);
  cplx align{1.0, 0.0};
  if (frame_hint) {
    const std::size_t pilot = std::min<std::size_t>(1024, rx.size());
    cplx num{0.0, 0.0};
    double den = 0.0;
    for (std::size_t p = 0; p < rx.pol_count(); ++p)
      for (std::size_t k = 0; k < pilot; ++k) {
        num += std::conj(frame_hint->symbols[p][k]) * rx.symbols[p][k];
        den += std::norm(frame_hint->symbols[p][k]);
      }
    align = num / den;
  } else {
    // QPSK: s^4 = -1 for every constellation point.
    cplx fourth{0.0, 0.0};
    double power = 0.0;
    for (std::size_t p = 0; p < rx.pol_count(); ++p)
      for (const auto& v : rx.symbols[p]) {
        const cplx v2 = v * v;
        fourth += v2 * v2;
        power += std::norm(v);
      }
    const double phase = std::arg(-fourth) / 4.0;
    const double mag = std::sqrt(power / (static_cast<double>(rx.size()) *
                                          static_cast<double>(rx.pol_count())));
    align = mag * cplx{std::cos(phase), std::sin(phase)};
  }
  DemodResult res;
  res.decided.baud_rate_hz = baud_hz;
  res.decided.symbols.resize(rx.pol_count());
  std::size_t errors = 0;
  for (std::size_t p = 0; p < rx.pol_count(); ++p) {
    res.decided.symbols[p].resize(rx.size());
    for (std::size_t k = 0; k < rx.size(); ++k) {
      const cplx d = detail::nearest_qpsk(rx.symbols[p][k] / align);
      res.decided.symbols[p][k] = d;
      if (frame_hint && std::norm(d - frame_hint->symbols[p][k]) > 1e-12) ++errors;
    }
  }
  if (frame_hint)
    res.error_rate = static_cast<double>(errors) /
                     (static_cast<double>(rx.size()) * static_cast<double>(rx.pol_count()));
  res.unreliable = res.error_rate > 1e-2;
  return res;
}

// Regenerate the reference waveform from decided symbols and split the
// received field into reference and residual on the z = 0 plane.
inline RxOutput build_reference_and_residual(const ComplexWaveform& w0,
                                             const SymbolFrame& decided,
                                             double rolloff,
                                             std::size_t samples_per_symbol) {
  if (average_power_mw(w0) <= 0.0)
    throw invalid_argument_error("build_reference_and_residual: zero input");
  RxOutput out;
  out.u_ref = shape_pulse(decided, rolloff, samples_per_symbol);  // 1 mW average
  if (out.u_ref.size() != w0.size())
    throw invalid_argument_error("build_reference_and_residual: length mismatch");
  cplx num{0.0, 0.0};
  double den = 0.0;
  for (std::size_t p = 0; p < w0.pol_count(); ++p)
    for (std::size_t k = 0; k < w0.size(); ++k) {
      num += std::conj(out.u_ref.pol[p][k]) * w0.pol[p][k];
      den += std::norm(out.u_ref.pol[p][k]);
    }
  out.raw_scale = num / den;
  if (std::abs(out.raw_scale) == 0.0)
    throw invalid_argument_error("build_reference_and_residual: orthogonal input");
  // Normalize the received field so the fitted reference has unit amplitude;
  // this is where the common scaling of the ratio-based estimators drops out.
  out.e_tot_0 = w0;
  for (auto& pol : out.e_tot_0.pol)
    for (auto& v : pol) v /= out.raw_scale;
  out.fit_scale = cplx{1.0, 0.0};
  out.delta_e = out.e_tot_0;
  for (std::size_t p = 0; p < w0.pol_count(); ++p)
    for (std::size_t k = 0; k < w0.size(); ++k)
      out.delta_e.pol[p][k] -= out.u_ref.pol[p][k];
  return out;
}

}  // namespace linkprof
