#pragma once

#include <complex>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "linkprof/common.hpp"

namespace linkprof {

// In-place complex FFT backed by FFTW. Plans are cached per size and executed
// through an aligned scratch buffer, so callers can pass plain std::vector
// storage. Planning is serialized; execution is thread-safe.
class FftEngine {
 public:
  static FftEngine& instance() {
    static FftEngine eng;
    return eng;
  }

  void forward(std::vector<cplx>& x) { execute(x, true); }
  void inverse(std::vector<cplx>& x) {
    execute(x, false);
    const double scale = 1.0 / static_cast<double>(x.size());
    for (auto& v : x) v *= scale;
  }

 private:
  struct Plans {
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    ~Plans() {
      if (fwd) fftw_destroy_plan(fwd);
      if (bwd) fftw_destroy_plan(bwd);
      if (buf) fftw_free(buf);
    }
  };

  FftEngine() = default;

  Plans& plans_for(std::size_t n) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(n);
    if (it == cache_.end()) {
      auto p = std::make_unique<Plans>();
      p->buf = fftw_alloc_complex(n);
      p->fwd = fftw_plan_dft_1d(static_cast<int>(n), p->buf, p->buf, FFTW_FORWARD,
                                FFTW_MEASURE);
      p->bwd = fftw_plan_dft_1d(static_cast<int>(n), p->buf, p->buf, FFTW_BACKWARD,
                                FFTW_MEASURE);
      it = cache_.emplace(n, std::move(p)).first;
    }
    return *it->second;
  }

  void execute(std::vector<cplx>& x, bool fwd) {
    if (x.empty()) throw invalid_argument_error("fft: empty input");
    Plans& p = plans_for(x.size());
    std::lock_guard<std::mutex> lock(exec_mu_);
    std::memcpy(p.buf, x.data(), x.size() * sizeof(cplx));
    fftw_execute(fwd ? p.fwd : p.bwd);
    std::memcpy(x.data(), p.buf, x.size() * sizeof(cplx));
  }

  std::mutex mu_;
  std::mutex exec_mu_;
  std::map<std::size_t, std::unique_ptr<Plans>> cache_;
};

inline void fft_forward(std::vector<cplx>& x) { FftEngine::instance().forward(x); }
inline void fft_inverse(std::vector<cplx>& x) { FftEngine::instance().inverse(x); }

// Signed DFT frequency for bin k of an N-point transform at sample rate fs.
inline double bin_frequency_hz(std::size_t k, std::size_t n, double fs) {
  const auto half = n / 2;
  const double idx = (k <= half) ? static_cast<double>(k)
                                 : static_cast<double>(k) - static_cast<double>(n);
  return idx * fs / static_cast<double>(n);
}

}  // namespace linkprof
