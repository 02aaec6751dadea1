#include <vector>

#include "kernel_rows.hpp"
#include "sslmseg/kernels.hpp"

namespace sslmseg::kernels {

double kth_of_union(std::span<const double> a, std::span<const double> b, std::size_t k) {
  // Take i elements from a and k+1-i from b; find the smallest i with a[i] >= b[k-i].
  std::size_t lo = k + 1 > b.size() ? k + 1 - b.size() : 0;
  std::size_t hi = std::min(k + 1, a.size());
  while (lo < hi) {
    const std::size_t i = lo + (hi - lo) / 2;
    if (a[i] < b[k - i]) {
      lo = i + 1;
    } else {
      hi = i;
    }
  }
  const std::size_t i = lo;
  const std::size_t j = k + 1 - i;
  if (i == 0) return b[j - 1];
  if (j == 0) return a[i - 1];
  return std::max(a[i - 1], b[j - 1]);
}

double union_quantile(std::span<const double> a, std::span<const double> b, double kappa) {
  const std::size_t n = a.size() + b.size();
  const double h = kappa * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  const double x0 = kth_of_union(a, b, lo);
  if (frac == 0.0 || lo + 1 >= n) return x0;
  const double x1 = kth_of_union(a, b, lo + 1);
  return x0 + frac * (x1 - x0);
}

namespace serial {

void stft_magnitude(const StftArgs& args) {
  const RealFft fft(args.window.size());
  FftScratch scratch(args.window.size());
  for (std::size_t f = 0; f < args.n_frames; ++f) detail::stft_frame(args, fft, scratch, f);
}

void lag_distances(const LagArgs& args) {
  for (std::size_t i = 0; i < args.series.frames; ++i) detail::lag_row(args, i);
}

void equalize(const EqualizeArgs& args) {
  std::vector<double> sorted(args.frames * args.lag_bins);
  for (std::size_t i = detail::first_needed_row(args); i < args.frames; ++i) {
    detail::sort_row(args, i, sorted);
  }
  for (std::size_t i = args.first_row; i < args.frames; ++i) {
    detail::equalize_row(args, sorted, i);
  }
}

void mel_db(const MelArgs& args) {
  for (std::size_t f = 0; f < args.n_frames; ++f) detail::mel_frame(args, f);
}

}  // namespace serial
}  // namespace sslmseg::kernels
