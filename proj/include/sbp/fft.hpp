#pragma once

// Real 3D FFT helpers on cubic grids (FFTW backend).
//
// Convention used throughout: the forward transform is unnormalized,
// the inverse divides by n^3.  Parseval then reads
//   sum_j f_j^2 * dx^3 = (dx^3 / n^3) * sum_k |fhat_k|^2.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace sbp::fft {

// FFTW's planner is not thread safe; plan execution on private buffers is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline std::size_t spectrum_size(int n) {
  return std::size_t(n) * n * (n / 2 + 1);
}

class Workspace {
 public:
  explicit Workspace(int n) : n_(n) {
    real_ = fftw_alloc_real(std::size_t(n) * n * n);
    cplx_ = fftw_alloc_complex(spectrum_size(n));
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = fftw_plan_dft_r2c_3d(n, n, n, real_, cplx_, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_3d(n, n, n, cplx_, real_, FFTW_ESTIMATE);
  }

  ~Workspace() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(real_);
    fftw_free(cplx_);
  }

  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  std::vector<std::complex<double>> forward(const std::vector<double>& f) {
    std::copy(f.begin(), f.end(), real_);
    fftw_execute(fwd_);
    std::vector<std::complex<double>> out(spectrum_size(n_));
    for (std::size_t m = 0; m < out.size(); ++m)
      out[m] = std::complex<double>(cplx_[m][0], cplx_[m][1]);
    return out;
  }

  std::vector<double> inverse(const std::vector<std::complex<double>>& spec) {
    for (std::size_t m = 0; m < spec.size(); ++m) {
      cplx_[m][0] = spec[m].real();
      cplx_[m][1] = spec[m].imag();
    }
    fftw_execute(inv_);
    const std::size_t total = std::size_t(n_) * n_ * n_;
    const double scale = 1.0 / double(total);
    std::vector<double> out(total);
    for (std::size_t j = 0; j < total; ++j) out[j] = real_[j] * scale;
    return out;
  }

 private:
  int n_;
  double* real_;
  fftw_complex* cplx_;
  fftw_plan fwd_;
  fftw_plan inv_;
};

// One workspace per transform size per thread.
inline Workspace& workspace(int n) {
  thread_local std::map<int, std::unique_ptr<Workspace>> pool;
  auto& slot = pool[n];
  if (!slot) slot = std::make_unique<Workspace>(n);
  return *slot;
}

inline std::vector<std::complex<double>> forward(int n, const std::vector<double>& f) {
  return workspace(n).forward(f);
}

inline std::vector<double> inverse(int n, const std::vector<std::complex<double>>& spec) {
  return workspace(n).inverse(spec);
}

}  // namespace sbp::fft
