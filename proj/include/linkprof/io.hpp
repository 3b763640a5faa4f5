#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "linkprof/common.hpp"
#include "linkprof/correlation.hpp"
#include "linkprof/gosnr.hpp"
#include "linkprof/waveform.hpp"

namespace linkprof {

// Binary waveform capture, little-endian:
//   magic "FPWV", u16 version=1, u8 pol_count, f64 sample_rate_hz,
//   f64 center_offset_hz, u64 sample_count, then per sample, per pol,
//   interleaved f64 (re, im).
inline void write_fpwv(const std::string& path, const ComplexWaveform& w) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_fpwv: cannot open " + path);
  auto put = [&f](const void* p, std::size_t n) {
    f.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  };
  put("FPWV", 4);
  const std::uint16_t version = 1;
  put(&version, 2);
  const std::uint8_t pols = static_cast<std::uint8_t>(w.pol_count());
  put(&pols, 1);
  put(&w.sample_rate_hz, 8);
  put(&w.center_offset_hz, 8);
  const std::uint64_t count = w.size();
  put(&count, 8);
  for (std::uint64_t k = 0; k < count; ++k)
    for (std::size_t p = 0; p < w.pol_count(); ++p) {
      const double re = w.pol[p][k].real(), im = w.pol[p][k].imag();
      put(&re, 8);
      put(&im, 8);
    }
  if (!f) throw std::runtime_error("write_fpwv: write failed for " + path);
}

inline ComplexWaveform read_fpwv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_fpwv: cannot open " + path);
  auto get = [&f, &path](void* p, std::size_t n) {
    f.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!f) throw std::runtime_error("read_fpwv: truncated file " + path);
  };
  char magic[4];
  get(magic, 4);
  if (std::memcmp(magic, "FPWV", 4) != 0)
    throw std::runtime_error("read_fpwv: bad magic in " + path);
  std::uint16_t version = 0;
  get(&version, 2);
  if (version != 1) throw std::runtime_error("read_fpwv: unsupported version");
  std::uint8_t pols = 0;
  get(&pols, 1);
  if (pols != 1 && pols != 2) throw std::runtime_error("read_fpwv: bad pol count");
  ComplexWaveform w;
  get(&w.sample_rate_hz, 8);
  get(&w.center_offset_hz, 8);
  std::uint64_t count = 0;
  get(&count, 8);
  w.pol.assign(pols, std::vector<cplx>(count));
  for (std::uint64_t k = 0; k < count; ++k)
    for (std::size_t p = 0; p < pols; ++p) {
      double re, im;
      get(&re, 8);
      get(&im, 8);
      w.pol[p][k] = {re, im};
    }
  return w;
}

namespace detail {

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace detail

inline std::string profile_csv(const CorrelationProfile& p) {
  std::ostringstream os;
  os << "z_km,value_real,value_imag,kind,blocks\n";
  const char* kind = (p.kind == ProfileKind::ppe) ? "PPE" : "NPPE";
  for (std::size_t i = 0; i < p.z_grid_km.size(); ++i)
    os << detail::fmt_double(p.z_grid_km[i]) << ',' << detail::fmt_double(p.values[i])
       << ',' << detail::fmt_double(p.values_imag[i]) << ',' << kind << ','
       << p.blocks_averaged << '\n';
  return os.str();
}

inline std::string gosnr_csv(const GosnrProfile& g) {
  std::ostringstream os;
  os << "z_km,gosnr_db,validity\n";
  for (std::size_t i = 0; i < g.z_grid_km.size(); ++i)
    os << detail::fmt_double(g.z_grid_km[i]) << ',' << detail::fmt_double(g.gosnr_db[i])
       << ',' << validity_name(g.validity[i]) << '\n';
  return os.str();
}

inline std::string reference_csv(const ReferenceProfile& r) {
  std::ostringstream os;
  os << "z_km,osnr_db,includes\n";
  for (std::size_t i = 0; i < r.z_grid_km.size(); ++i)
    os << detail::fmt_double(r.z_grid_km[i]) << ','
       << detail::fmt_double(r.osnr_db[i]) << ',' << r.includes << '\n';
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace linkprof
