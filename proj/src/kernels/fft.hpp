#pragma once

#include <complex>
#include <cstddef>

#include <fftw3.h>

namespace sslmseg::kernels {

/// Real-to-complex FFT of a fixed size. Planning is serialised; execute() is
/// thread-safe given per-call buffers from fftw_malloc.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  void execute(double* in, fftw_complex* out) const;

 private:
  std::size_t n_;
  fftw_plan plan_;
};

/// Scratch buffers for one thread.
struct FftScratch {
  explicit FftScratch(std::size_t n);
  ~FftScratch();
  FftScratch(const FftScratch&) = delete;
  FftScratch& operator=(const FftScratch&) = delete;

  double* in;
  fftw_complex* out;
};

}  // namespace sslmseg::kernels
