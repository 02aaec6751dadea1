#include "fft.hpp"

#include <mutex>
#include <new>

namespace sslmseg::kernels {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  FftScratch probe(n);
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), probe.in, probe.out, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan_);
}

void RealFft::execute(double* in, fftw_complex* out) const {
  fftw_execute_dft_r2c(plan_, in, out);
}

FftScratch::FftScratch(std::size_t n)
    : in(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
      out(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
  if (in == nullptr || out == nullptr) {
    fftw_free(in);
    fftw_free(out);
    throw std::bad_alloc();
  }
}

FftScratch::~FftScratch() {
  fftw_free(in);
  fftw_free(out);
}

}  // namespace sslmseg::kernels
