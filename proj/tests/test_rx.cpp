#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "linkprof/rx.hpp"
#include "linkprof/ssfm.hpp"

using namespace linkprof;
using Catch::Approx;

namespace {

// Analytic QPSK symbol error rate at Es/N0 (linear).
double qpsk_ser(double es_n0) {
  // Per-dimension error probability Q(sqrt(Es/N0)) for unit-energy QPSK.
  const double qd = 0.5 * std::erfc(std::sqrt(es_n0) / std::sqrt(2.0));
  return 1.0 - (1.0 - qd) * (1.0 - qd);
}

LinkSpec simple_link(std::size_t spans = 3) {
  LinkSpec spec;
  FiberSpan s;
  s.length_km = 80.0;
  s.gamma_per_w_km = 0.0;
  s.alpha_db_per_km = 0.0;
  spec.spans.assign(spans, s);
  return spec;
}

}  // namespace

TEST_CASE("compensate_dispersion inverts a linear noiseless link") {
  auto plan = compile(simple_link());
  auto f = generate_symbols(1u << 12, 2, 1);
  f.baud_rate_hz = 68e9;
  auto tx = set_average_power(shape_pulse(f, 0.1, 2), 0.0);
  SsfmConfig cfg;
  cfg.step_km = 5.0;
  auto rx = propagate(tx, plan, cfg, 0);
  auto w0 = compensate_dispersion(rx, plan);
  double err = 0.0, ref = 0.0;
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t k = 0; k < tx.size(); ++k) {
      err += std::norm(w0.pol[p][k] - tx.pol[p][k]);
      ref += std::norm(tx.pol[p][k]);
    }
  REQUIRE(std::sqrt(err / ref) < 1e-9);
}

TEST_CASE("compensate_dispersion: zero-dispersion plan is the identity") {
  LinkSpec spec = simple_link(1);
  spec.spans[0].dispersion_D_ps_nm_km = 0.0;
  auto plan = compile(spec);
  auto f = generate_symbols(1u << 10, 1, 2);
  f.baud_rate_hz = 68e9;
  auto w = shape_pulse(f, 0.1, 2);
  auto out = compensate_dispersion(w, plan);
  double err = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) err += std::norm(out.pol[0][k] - w.pol[0][k]);
  REQUIRE(err == 0.0);
}

TEST_CASE("demodulate: noiseless back-to-back has zero errors") {
  auto f = generate_symbols(1u << 12, 2, 3);
  f.baud_rate_hz = 68e9;
  auto w = shape_pulse(f, 0.1, 2);
  auto res = demodulate(w, f, 68e9, 0.1, 2);
  REQUIRE(res.error_rate == 0.0);
  REQUIRE_FALSE(res.unreliable);
}

TEST_CASE("demodulate: AWGN error rates bracket the analytic QPSK SER") {
  const std::size_t nsym = 1u << 15;
  auto f = generate_symbols(nsym, 2, 4);
  f.baud_rate_hz = 68e9;
  auto w = shape_pulse(f, 0.1, 2);  // 1 mW mean power

  // In-band SNR 20 dB: error rate should be ~Q-function tiny (< 1e-9).
  {
    // White noise over the full band; in-band portion sets Es/N0.
    const double snr_ib = 100.0;
    const double noise_mw = 1.0 / snr_ib * (w.sample_rate_hz / 68e9);
    auto n = generate_awgn(w, noise_mw, 5);
    auto noisy = w;
    add_in_place(noisy, n);
    auto res = demodulate(noisy, f, 68e9, 0.1, 2);
    REQUIRE(res.error_rate < 1e-6);  // analytic SER ~ 2Q(10) << 1e-9
    REQUIRE_FALSE(res.unreliable);
  }
  // In-band SNR 3 dB: nonzero error rate near the analytic value, warning set.
  {
    const double snr_ib = std::pow(10.0, 0.3);
    const double noise_mw = 1.0 / snr_ib * (w.sample_rate_hz / 68e9);
    auto n = generate_awgn(w, noise_mw, 6);
    auto noisy = w;
    add_in_place(noisy, n);
    auto res = demodulate(noisy, f, 68e9, 0.1, 2);
    const double expect = qpsk_ser(snr_ib);
    REQUIRE(res.error_rate > 0.0);
    REQUIRE(res.error_rate == Approx(expect).epsilon(0.15));
    REQUIRE(res.unreliable);
  }
}

TEST_CASE("demodulate: blind mode matches genie decisions when error-free") {
  auto f = generate_symbols(1u << 12, 2, 7);
  f.baud_rate_hz = 68e9;
  auto w = shape_pulse(f, 0.1, 2);
  auto genie = demodulate(w, f, 68e9, 0.1, 2);
  auto blind = demodulate(w, std::nullopt, 68e9, 0.1, 2);
  REQUIRE(genie.error_rate == 0.0);
  // Blind decisions equal the genie decisions up to a common pi/2 rotation.
  cplx rot = blind.decided.symbols[0][0] / genie.decided.symbols[0][0];
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t k = 0; k < genie.decided.size(); ++k)
      REQUIRE(std::abs(blind.decided.symbols[p][k] -
                       rot * genie.decided.symbols[p][k]) < 1e-12);
}

TEST_CASE("build_reference_and_residual: exact reference gives zero residual") {
  auto f = generate_symbols(1u << 10, 2, 8);
  f.baud_rate_hz = 68e9;
  auto u = shape_pulse(f, 0.1, 2);
  auto out = build_reference_and_residual(u, f, 0.1, 2);
  REQUIRE(std::abs(out.raw_scale - cplx{1.0, 0.0}) < 1e-9);
  REQUIRE(average_power_mw(out.delta_e) < 1e-18);
  REQUIRE(average_power_mw(out.u_ref) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("build_reference_and_residual: LS orthogonality and noise recovery") {
  auto f = generate_symbols(1u << 12, 2, 9);
  f.baud_rate_hz = 68e9;
  auto u = shape_pulse(f, 0.1, 2);
  auto n = generate_awgn(u, 0.01, 10);
  auto w0 = u;
  add_in_place(w0, n);
  auto out = build_reference_and_residual(w0, f, 0.1, 2);
  // <u* delta_e> = 0 within 1e-10 relative to powers.
  cplx dot{0, 0};
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t k = 0; k < u.size(); ++k)
      dot += std::conj(out.u_ref.pol[p][k]) * out.delta_e.pol[p][k];
  dot /= static_cast<double>(u.size());
  REQUIRE(std::abs(dot) < 1e-10);
  // Residual power ~ injected noise power (LS removes only the u component).
  REQUIRE(average_power_mw(out.delta_e) == Approx(0.01).epsilon(0.05));
  // Invariant: delta_e = e_tot_0 - fit_scale * u_ref.
  double max_err = 0.0;
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t k = 0; k < u.size(); ++k)
      max_err = std::max(max_err,
                         std::abs(out.delta_e.pol[p][k] -
                                  (out.e_tot_0.pol[p][k] -
                                   out.fit_scale * out.u_ref.pol[p][k])));
  REQUIRE(max_err < 1e-12);
}

TEST_CASE("build_reference_and_residual: complex scaling invariance") {
  auto f = generate_symbols(1u << 11, 2, 11);
  f.baud_rate_hz = 68e9;
  auto u = shape_pulse(f, 0.1, 2);
  auto n = generate_awgn(u, 0.02, 12);
  auto w0 = u;
  add_in_place(w0, n);
  auto base = build_reference_and_residual(w0, f, 0.1, 2);
  auto scaled_w0 = w0;
  const cplx c{-1.7, 2.3};
  for (auto& pol : scaled_w0.pol)
    for (auto& v : pol) v *= c;
  auto scaled = build_reference_and_residual(scaled_w0, f, 0.1, 2);
  // Normalized field and residual are unchanged by the common complex scale.
  double max_err = 0.0;
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t k = 0; k < u.size(); ++k)
      max_err = std::max(max_err, std::abs(scaled.e_tot_0.pol[p][k] -
                                           base.e_tot_0.pol[p][k]));
  REQUIRE(max_err < 1e-12);
  REQUIRE(average_power_mw(scaled.delta_e) ==
          Approx(average_power_mw(base.delta_e)).epsilon(1e-12));
}

TEST_CASE("build_reference_and_residual: zero input rejected") {
  ComplexWaveform z;
  z.sample_rate_hz = 136e9;
  z.pol.assign(2, std::vector<cplx>(1u << 10, cplx{0.0, 0.0}));
  auto f = generate_symbols(1u << 9, 2, 13);
  f.baud_rate_hz = 68e9;
  REQUIRE_THROWS_AS(build_reference_and_residual(z, f, 0.1, 2),
                    invalid_argument_error);
}
