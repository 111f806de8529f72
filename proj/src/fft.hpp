#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace wrsync::detail {

// Real <-> half-complex transform pair of fixed length backed by FFTW.
// Unnormalized in both directions, so inverse(forward(x)) == n * x.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  std::span<double> real() { return {real_, n_}; }
  std::span<std::complex<double>> spectrum();

  void forward();  // real() -> spectrum()
  void inverse();  // spectrum() -> real()

 private:
  std::size_t n_;
  double* real_;
  void* spectrum_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace wrsync::detail
