#include <omp.h>

#include <vector>

#include "kernel_rows.hpp"
#include "sslmseg/kernels.hpp"

namespace sslmseg::kernels::omp {

void stft_magnitude(const StftArgs& args) {
  const RealFft fft(args.window.size());
  const auto n = static_cast<std::ptrdiff_t>(args.n_frames);
#pragma omp parallel
  {
    FftScratch scratch(args.window.size());
#pragma omp for schedule(static)
    for (std::ptrdiff_t f = 0; f < n; ++f) {
      detail::stft_frame(args, fft, scratch, static_cast<std::size_t>(f));
    }
  }
}

void lag_distances(const LagArgs& args) {
  const auto n = static_cast<std::ptrdiff_t>(args.series.frames);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) detail::lag_row(args, static_cast<std::size_t>(i));
}

void equalize(const EqualizeArgs& args) {
  std::vector<double> sorted(args.frames * args.lag_bins);
  const auto first_needed = static_cast<std::ptrdiff_t>(detail::first_needed_row(args));
  const auto n = static_cast<std::ptrdiff_t>(args.frames);
  const auto first = static_cast<std::ptrdiff_t>(args.first_row);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = first_needed; i < n; ++i) {
      detail::sort_row(args, static_cast<std::size_t>(i), sorted);
    }
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = first; i < n; ++i) {
      detail::equalize_row(args, sorted, static_cast<std::size_t>(i));
    }
  }
}

void mel_db(const MelArgs& args) {
  const auto n = static_cast<std::ptrdiff_t>(args.n_frames);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t f = 0; f < n; ++f) detail::mel_frame(args, static_cast<std::size_t>(f));
}

}  // namespace sslmseg::kernels::omp
