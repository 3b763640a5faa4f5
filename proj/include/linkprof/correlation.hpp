#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "linkprof/common.hpp"
#include "linkprof/fft.hpp"
#include "linkprof/link.hpp"
#include "linkprof/rx.hpp"
#include "linkprof/ssfm.hpp"

namespace linkprof {

enum class ProfileKind { ppe, nppe };

enum class CorrelationConvention { real_part, magnitude };

struct CorrelationProfile {
  std::vector<double> z_grid_km;
  std::vector<double> values;       // correlation per z_k (real part by default)
  std::vector<double> values_imag;  // imaginary part, for leakage diagnostics
  std::vector<double> std_error;    // block-to-block standard error of the mean
  ProfileKind kind = ProfileKind::ppe;
  std::size_t blocks_averaged = 0;
  double imag_leakage = 0.0;  // max |Im/Re| over grid points with non-negligible Re
};

// Nonlinear distortion generator of the enhanced regular perturbation model:
// out_p(t) = (P_tot(t) - 2<P_tot>) * w_p(t), with P_tot summed over
// polarizations and <.> the block time average.
inline ComplexWaveform n_erp(const ComplexWaveform& w) {
  ComplexWaveform out = w;
  if (w.size() == 0) return out;
  std::vector<double> p_tot(w.size(), 0.0);
  double mean = 0.0;
  for (const auto& pol : w.pol)
    for (std::size_t k = 0; k < w.size(); ++k) p_tot[k] += std::norm(pol[k]);
  for (double p : p_tot) mean += p;
  mean /= static_cast<double>(w.size());
  for (auto& pol : out.pol)
    for (std::size_t k = 0; k < w.size(); ++k) pol[k] *= (p_tot[k] - 2.0 * mean);
  return out;
}

// Correlation template for position z, on the z = 0 reference plane:
// -j * D(-B(z)) . N_eRP . D(+B(z)) applied to the base waveform.
inline ComplexWaveform build_template(const ComplexWaveform& base, double z_km,
                                      const PropagationPlan& plan) {
  const double b = plan.cumulative_beta2_ps2(z_km);  // throws outside [0, L]
  ComplexWaveform t = dispersion_step(base, b);
  t = n_erp(t);
  t = dispersion_step(t, -b);
  for (auto& pol : t.pol)
    for (auto& v : pol) v *= cplx{0.0, -1.0};
  return t;
}

// Time-average of conj(a)*b summed over polarizations.
inline cplx correlate(const ComplexWaveform& a, const ComplexWaveform& b) {
  if (a.size() != b.size() || a.pol_count() != b.pol_count())
    throw invalid_argument_error("correlate: shape mismatch");
  cplx acc{0.0, 0.0};
  for (std::size_t p = 0; p < a.pol_count(); ++p)
    for (std::size_t k = 0; k < a.size(); ++k)
      acc += std::conj(a.pol[p][k]) * b.pol[p][k];
  return acc / static_cast<double>(a.size());
}

// Streaming accumulator for correlation profiles. Per block and per z_k it
// builds the template from u_ref (PPE) or the normalized total field (NPPE)
// and correlates it against delta_e; blocks are reduced in a fixed order.
class ProfileAccumulator {
 public:
  ProfileAccumulator(std::vector<double> z_grid, const PropagationPlan& plan)
      : z_grid_(std::move(z_grid)), plan_(&plan) {
    for (double z : z_grid_)
      if (z < 0.0 || z > plan.total_length_km + 1e-9)
        throw invalid_argument_error("profile: z grid outside [0, L]");
    ppe_sum_.assign(z_grid_.size(), {0.0, 0.0});
    nppe_sum_.assign(z_grid_.size(), {0.0, 0.0});
    ppe_sq_.assign(z_grid_.size(), 0.0);
    nppe_sq_.assign(z_grid_.size(), 0.0);
  }

  void add_block(const RxOutput& rx) {
    // NPPE base: total received field normalized to unit average power.
    ComplexWaveform nppe_base = rx.e_tot_0;
    const double p = average_power_mw(nppe_base);
    const double s = 1.0 / std::sqrt(p);
    for (auto& pol : nppe_base.pol)
      for (auto& v : pol) v *= s;
    accumulate(rx.u_ref, rx.delta_e, ppe_sum_, ppe_sq_);
    accumulate(nppe_base, rx.delta_e, nppe_sum_, nppe_sq_);
    ++blocks_;
  }

  CorrelationProfile finalize(ProfileKind kind) const {
    if (blocks_ == 0) throw invalid_argument_error("profile: no blocks");
    const auto& sum = (kind == ProfileKind::ppe) ? ppe_sum_ : nppe_sum_;
    const auto& sq = (kind == ProfileKind::ppe) ? ppe_sq_ : nppe_sq_;
    CorrelationProfile prof;
    prof.kind = kind;
    prof.z_grid_km = z_grid_;
    prof.blocks_averaged = blocks_;
    const double nb = static_cast<double>(blocks_);
    prof.values.resize(z_grid_.size());
    prof.values_imag.resize(z_grid_.size());
    prof.std_error.assign(z_grid_.size(), 0.0);
    double max_re = 0.0;
    for (std::size_t i = 0; i < z_grid_.size(); ++i) {
      prof.values[i] = sum[i].real() / nb;
      prof.values_imag[i] = sum[i].imag() / nb;
      max_re = std::max(max_re, std::abs(prof.values[i]));
      if (blocks_ > 1) {
        const double var = std::max(0.0, sq[i] / nb - prof.values[i] * prof.values[i]);
        prof.std_error[i] = std::sqrt(var / (nb - 1.0));
      }
    }
    for (std::size_t i = 0; i < z_grid_.size(); ++i) {
      if (std::abs(prof.values[i]) > 1e-3 * max_re)
        prof.imag_leakage = std::max(
            prof.imag_leakage, std::abs(prof.values_imag[i] / prof.values[i]));
    }
    return prof;
  }

  std::size_t blocks() const { return blocks_; }

 private:
  // Template/correlation sweep with the base spectrum cached; equivalent to
  // correlate(delta_e, build_template(base, z, plan)) per grid point.
  void accumulate(const ComplexWaveform& base, const ComplexWaveform& delta_e,
                  std::vector<cplx>& sums, std::vector<double>& sqs) {
    const std::size_t n = base.size();
    const std::size_t np = base.pol_count();
    std::vector<std::vector<cplx>> base_spec(np);
    for (std::size_t p = 0; p < np; ++p) {
      base_spec[p] = base.pol[p];
      fft_forward(base_spec[p]);
    }
    std::vector<double> omega2(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double w = 2.0 * kPi * bin_frequency_hz(k, n, base.sample_rate_hz);
      omega2[k] = w * w;
    }
    ComplexWaveform at_z = base;
    for (std::size_t zi = 0; zi < z_grid_.size(); ++zi) {
      const double b_s2 = plan_->cumulative_beta2_ps2(z_grid_[zi]) * 1e-24;
      std::vector<cplx> phase(n);
      for (std::size_t k = 0; k < n; ++k) {
        const double ph = 0.5 * b_s2 * omega2[k];
        phase[k] = cplx{std::cos(ph), std::sin(ph)};
      }
      for (std::size_t p = 0; p < np; ++p) {
        at_z.pol[p] = base_spec[p];
        for (std::size_t k = 0; k < n; ++k) at_z.pol[p][k] *= phase[k];
        fft_inverse(at_z.pol[p]);
      }
      ComplexWaveform t = n_erp(at_z);
      for (auto& pol : t.pol) {
        fft_forward(pol);
        for (std::size_t k = 0; k < n; ++k) pol[k] *= std::conj(phase[k]);
        fft_inverse(pol);
      }
      // correlate(delta_e, -j * t)
      const cplx c = correlate(delta_e, t) * cplx{0.0, -1.0};
      sums[zi] += c;
      sqs[zi] += c.real() * c.real();
    }
  }

  std::vector<double> z_grid_;
  const PropagationPlan* plan_;
  std::vector<cplx> ppe_sum_, nppe_sum_;
  std::vector<double> ppe_sq_, nppe_sq_;
  std::size_t blocks_ = 0;
};

inline CorrelationProfile profile(const std::vector<RxOutput>& rx_blocks,
                                  ProfileKind kind, const PropagationPlan& plan,
                                  const std::vector<double>& z_grid) {
  if (rx_blocks.empty()) throw invalid_argument_error("profile: empty block list");
  ProfileAccumulator acc(z_grid, plan);
  for (const auto& rx : rx_blocks) acc.add_block(rx);
  return acc.finalize(kind);
}

inline std::vector<double> make_z_grid(double total_length_km, double step_km) {
  if (step_km <= 0.0) throw invalid_argument_error("z grid: step must be > 0");
  std::vector<double> grid;
  for (double z = 0.0; z < total_length_km + step_km / 2.0; z += step_km)
    grid.push_back(std::min(z, total_length_km));
  return grid;
}

}  // namespace linkprof
