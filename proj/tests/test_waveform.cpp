#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "linkprof/waveform.hpp"

using namespace linkprof;
using Catch::Approx;

TEST_CASE("generate_symbols: determinism and constellation") {
  auto a = generate_symbols(4, 1, 42);
  auto b = generate_symbols(4, 1, 42);
  REQUIRE(a.symbols == b.symbols);
  for (const auto& s : a.symbols[0]) {
    REQUIRE(std::abs(std::abs(s) - 1.0) < 1e-15);
    REQUIRE(std::abs(std::abs(s.real()) - std::sqrt(0.5)) < 1e-15);
  }
}

TEST_CASE("generate_symbols: exact unit mean power per polarization") {
  auto f = generate_symbols(1u << 16, 2, 1);
  for (const auto& pol : f.symbols) {
    double p = 0.0;
    for (const auto& s : pol) p += std::norm(s);
    REQUIRE(p / static_cast<double>(pol.size()) == Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("generate_symbols: distinct seeds decorrelated") {
  const std::size_t n = 1u << 14;
  auto a = generate_symbols(n, 1, 1);
  auto b = generate_symbols(n, 1, 2);
  cplx acc{0.0, 0.0};
  for (std::size_t k = 0; k < n; ++k)
    acc += std::conj(a.symbols[0][k]) * b.symbols[0][k];
  REQUIRE(std::abs(acc) / static_cast<double>(n) < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("generate_symbols: zero count rejected") {
  REQUIRE_THROWS_AS(generate_symbols(0, 1, 1), invalid_argument_error);
}

TEST_CASE("shape_pulse: single impulse gives RRC response peaked at center") {
  SymbolFrame f;
  f.baud_rate_hz = 64e9;
  f.symbols = {std::vector<cplx>(64, cplx{0.0, 0.0})};
  f.symbols[0][32] = cplx{1.0, 0.0};
  auto w = shape_pulse(f, 0.1, 4);
  REQUIRE(w.sample_rate_hz == Approx(64e9 * 4));
  std::size_t peak = 0;
  for (std::size_t k = 0; k < w.size(); ++k)
    if (std::abs(w.pol[0][k]) > std::abs(w.pol[0][peak])) peak = k;
  REQUIRE(peak == 32 * 4);
}

TEST_CASE("shape_pulse: matched filter recovers symbols with zero ISI") {
  auto f = generate_symbols(1u << 10, 2, 7);
  f.baud_rate_hz = 68e9;
  auto w = shape_pulse(f, 0.1, 2);
  auto rec = matched_filter_decimate(w, f.baud_rate_hz, 0.1, 2);
  // LS scale, then EVM.
  cplx num{0, 0};
  double den = 0.0;
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t k = 0; k < f.size(); ++k) {
      num += std::conj(f.symbols[p][k]) * rec.symbols[p][k];
      den += std::norm(f.symbols[p][k]);
    }
  const cplx a = num / den;
  double err = 0.0, ref = 0.0;
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t k = 0; k < f.size(); ++k) {
      err += std::norm(rec.symbols[p][k] / a - f.symbols[p][k]);
      ref += std::norm(f.symbols[p][k]);
    }
  REQUIRE(std::sqrt(err / ref) < 1e-6);
}

TEST_CASE("shape_pulse: spectrum vanishes beyond (1+rolloff)*baud/2") {
  auto f = generate_symbols(1u << 12, 1, 3);
  f.baud_rate_hz = 68e9;
  auto w = shape_pulse(f, 0.1, 2);
  auto x = w.pol[0];
  fft_forward(x);
  double out_of_band = 0.0, total = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double fq = bin_frequency_hz(k, x.size(), w.sample_rate_hz);
    total += std::norm(x[k]);
    if (std::abs(fq) > 1.1 * 68e9 / 2.0 * (1.0 + 1e-9)) out_of_band += std::norm(x[k]);
  }
  REQUIRE(out_of_band / total < 1e-24);
}

TEST_CASE("shape_pulse: rejects too-small oversampling") {
  auto f = generate_symbols(16, 1, 1);
  f.baud_rate_hz = 1e9;
  REQUIRE_THROWS_AS(shape_pulse(f, 0.1, 1), invalid_argument_error);
}

TEST_CASE("set_average_power: hits target and round-trips") {
  auto f = generate_symbols(1u << 10, 2, 5);
  f.baud_rate_hz = 68e9;
  auto w = shape_pulse(f, 0.1, 2);
  auto w0 = set_average_power(w, 0.0);
  REQUIRE(average_power_mw(w0) == Approx(1.0).epsilon(1e-12));
  auto w5 = set_average_power(w, 5.0);
  REQUIRE(average_power_mw(w5) == Approx(3.16227766016838).epsilon(1e-12));
  auto w5b = set_average_power(w5, 5.0);
  REQUIRE(average_power_mw(w5b) == Approx(average_power_mw(w5)).epsilon(1e-14));
}

TEST_CASE("set_average_power: zero waveform rejected") {
  ComplexWaveform w;
  w.sample_rate_hz = 1e9;
  w.pol = {std::vector<cplx>(16, cplx{0.0, 0.0})};
  REQUIRE_THROWS_AS(set_average_power(w, 0.0), invalid_argument_error);
}

TEST_CASE("generate_awgn: power split, circular symmetry, zero power") {
  ComplexWaveform shape;
  shape.sample_rate_hz = 2e9;
  shape.pol.assign(2, std::vector<cplx>(1u << 18));

  auto zero = generate_awgn(shape, 0.0, 1);
  REQUIRE(average_power_mw(zero) == 0.0);

  auto n = generate_awgn(shape, 1.0, 1);
  for (std::size_t p = 0; p < 2; ++p) {
    double pw = 0.0, re2 = 0.0, im2 = 0.0;
    for (const auto& v : n.pol[p]) {
      pw += std::norm(v);
      re2 += v.real() * v.real();
      im2 += v.imag() * v.imag();
    }
    const double count = static_cast<double>(n.size());
    REQUIRE(pw / count == Approx(0.5).epsilon(0.01));
    REQUIRE(re2 / count == Approx(0.25).epsilon(0.02));
    REQUIRE(im2 / count == Approx(0.25).epsilon(0.02));
  }
  REQUIRE_THROWS_AS(generate_awgn(shape, -1.0, 1), invalid_argument_error);
}

TEST_CASE("generate_awgn: distinct seeds decorrelated") {
  ComplexWaveform shape;
  shape.sample_rate_hz = 2e9;
  shape.pol.assign(1, std::vector<cplx>(1u << 16));
  auto a = generate_awgn(shape, 1.0, 10);
  auto b = generate_awgn(shape, 1.0, 11);
  cplx acc{0, 0};
  for (std::size_t k = 0; k < a.size(); ++k)
    acc += std::conj(a.pol[0][k]) * b.pol[0][k];
  const double n = static_cast<double>(a.size());
  REQUIRE(std::abs(acc) / n < 3.0 / std::sqrt(n));
}

TEST_CASE("average_power: basics") {
  ComplexWaveform w;
  w.sample_rate_hz = 1e9;
  w.pol = {std::vector<cplx>(64, cplx{1.0, 0.0})};
  REQUIRE(average_power_mw(w) == Approx(1.0));
  ComplexWaveform empty;
  REQUIRE_THROWS_AS(average_power_mw(empty), invalid_argument_error);
}

TEST_CASE("average_power: concatenation is length-weighted mean") {
  ComplexWaveform a, b;
  a.sample_rate_hz = b.sample_rate_hz = 1e9;
  a.pol = {std::vector<cplx>(32, cplx{1.0, 0.0})};
  b.pol = {std::vector<cplx>(96, cplx{2.0, 0.0})};
  ComplexWaveform cat = a;
  cat.pol[0].insert(cat.pol[0].end(), b.pol[0].begin(), b.pol[0].end());
  const double expect =
      (32.0 * average_power_mw(a) + 96.0 * average_power_mw(b)) / 128.0;
  REQUIRE(average_power_mw(cat) == Approx(expect).epsilon(1e-14));
}
