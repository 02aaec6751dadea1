#pragma once

// Per-frame / per-row bodies shared by the serial and OpenMP kernels.

#include <algorithm>
#include <cmath>
#include <vector>

#include "fft.hpp"
#include "sslmseg/kernels.hpp"

namespace sslmseg::kernels::detail {

inline void stft_frame(const StftArgs& a, const RealFft& fft, FftScratch& scratch,
                       std::size_t frame) {
  const std::size_t n_fft = fft.size();
  const std::size_t n_bins = n_fft / 2 + 1;
  const float* src = a.samples.data() + frame * a.hop;
  for (std::size_t n = 0; n < n_fft; ++n) scratch.in[n] = a.window[n] * src[n];
  fft.execute(scratch.in, scratch.out);
  for (std::size_t k = 0; k < n_bins; ++k) {
    a.out[k * a.n_frames + frame] =
        static_cast<float>(std::hypot(scratch.out[k][0], scratch.out[k][1]));
  }
}

inline void lag_row(const LagArgs& a, std::size_t i) {
  const std::size_t dims = a.series.dims;
  const std::span<const double> cur = a.series.data.subspan(i * dims, dims);
  double* row = a.out.data() + i * a.lag_bins;
  for (std::size_t l = 1; l <= a.lag_bins; ++l) {
    const std::size_t j = i >= l ? i - l : 0;
    row[l - 1] = distance(cur, a.series.data.subspan(j * dims, dims), a.metric);
  }
}

inline void sort_row(const EqualizeArgs& a, std::size_t i, std::vector<double>& sorted) {
  const double* row = a.distances.data() + i * a.lag_bins;
  std::copy(row, row + a.lag_bins, sorted.begin() + static_cast<std::ptrdiff_t>(i * a.lag_bins));
  std::sort(sorted.begin() + static_cast<std::ptrdiff_t>(i * a.lag_bins),
            sorted.begin() + static_cast<std::ptrdiff_t>((i + 1) * a.lag_bins));
}

inline void equalize_row(const EqualizeArgs& a, const std::vector<double>& sorted, std::size_t i) {
  const std::size_t L = a.lag_bins;
  const std::span<const double> all(sorted);
  const auto row_i = all.subspan(i * L, L);
  for (std::size_t l = 1; l <= L; ++l) {
    const std::size_t j = i >= l ? i - l : i;
    a.out[i * L + (l - 1)] = union_quantile(row_i, all.subspan(j * L, L), a.kappa);
  }
}

inline void mel_frame(const MelArgs& a, std::size_t f) {
  const double floor_amp = std::pow(10.0, a.floor_db / 20.0);
  for (std::size_t m = 0; m < a.n_mels; ++m) {
    const double* w = a.weights.data() + m * a.n_bins;
    double acc = 0.0;
    for (std::size_t k = 0; k < a.n_bins; ++k) {
      if (w[k] != 0.0) acc += w[k] * a.stft[k * a.n_frames + f];
    }
    double db = acc > 0.0 ? 20.0 * std::log10(acc + floor_amp) : a.floor_db;
    if (db < a.floor_db) db = a.floor_db;
    a.out[m * a.n_frames + f] = static_cast<float>(db);
  }
}

/// Rows of D that equalization of rows >= first_row depends on.
inline std::size_t first_needed_row(const EqualizeArgs& a) {
  return a.first_row > a.lag_bins ? a.first_row - a.lag_bins : 0;
}

}  // namespace sslmseg::kernels::detail
