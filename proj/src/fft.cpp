#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>

namespace wrsync::detail {

namespace {
// FFTW's planner is not re-entrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  real_ = fftw_alloc_real(n_);
  spectrum_ = fftw_alloc_complex(bins());
  if (real_ == nullptr || spectrum_ == nullptr) {
    fftw_free(real_);
    fftw_free(spectrum_);
    throw std::bad_alloc();
  }
  std::lock_guard lock(planner_mutex());
  auto* spec = static_cast<fftw_complex*>(spectrum_);
  const int len = static_cast<int>(n_);
  forward_plan_ = fftw_plan_dft_r2c_1d(len, real_, spec, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(len, spec, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  }
  fftw_free(real_);
  fftw_free(spectrum_);
}

std::span<std::complex<double>> RealFft::spectrum() {
  // fftw_complex is layout-compatible with std::complex<double>.
  return {reinterpret_cast<std::complex<double>*>(spectrum_), bins()};
}

void RealFft::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }

void RealFft::inverse() { fftw_execute(static_cast<fftw_plan>(inverse_plan_)); }

}  // namespace wrsync::detail
