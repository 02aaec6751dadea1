#pragma once

// Data-parallel inner loops of the feature pipeline. Every kernel exists as an
// OpenMP version (used by the pipeline) and a serial reference kept for tests
// and benchmarks; both produce bit-identical output.

#include <cstddef>
#include <span>

#include "sslmseg/distance.hpp"

namespace sslmseg::kernels {

/// Input of the STFT kernel. `out` is [(n_fft/2+1) x n_frames] row-major.
struct StftArgs {
  std::span<const float> samples;
  std::span<const double> window;  // length n_fft
  std::size_t hop = 0;
  std::size_t n_frames = 0;
  std::span<float> out;
};

/// Column-major feature series: frame i occupies data[i*dims, (i+1)*dims).
struct SeriesView {
  std::span<const double> data;
  std::size_t dims = 0;
  std::size_t frames = 0;
};

/// Lag-distance matrix D [frames x lag_bins] row-major; column l-1 holds lag l.
/// Lags reaching before frame 0 compare against frame 0.
struct LagArgs {
  SeriesView series;
  std::size_t lag_bins = 0;
  Metric metric = Metric::euclidean;
  std::span<double> out;
};

/// Equalization eps[i][l] = quantile_kappa(row i ++ row i-l) of D, for rows
/// i >= first_row (earlier rows are left untouched). Row i is duplicated when
/// i - l < 0.
struct EqualizeArgs {
  std::span<const double> distances;
  std::size_t frames = 0;
  std::size_t lag_bins = 0;
  double kappa = 0.1;
  std::size_t first_row = 0;
  std::span<double> out;
};

/// Mel projection: out[m][f] = sum_k weights[m][k] * stft[k][f].
struct MelArgs {
  std::span<const double> weights;  // [n_mels x n_bins]
  std::size_t n_mels = 0;
  std::span<const float> stft;      // [n_bins x n_frames]
  std::size_t n_bins = 0;
  std::size_t n_frames = 0;
  double floor_db = -70.0;
  std::span<float> out;             // [n_mels x n_frames], dB
};

namespace serial {
void stft_magnitude(const StftArgs& args);
void lag_distances(const LagArgs& args);
void equalize(const EqualizeArgs& args);
void mel_db(const MelArgs& args);
}  // namespace serial

namespace omp {
void stft_magnitude(const StftArgs& args);
void lag_distances(const LagArgs& args);
void equalize(const EqualizeArgs& args);
void mel_db(const MelArgs& args);
}  // namespace omp

/// k-th smallest (0-based) element of the union of two ascending sequences.
double kth_of_union(std::span<const double> a, std::span<const double> b, std::size_t k);

/// Linear-interpolation quantile of the union of two ascending sequences.
double union_quantile(std::span<const double> a, std::span<const double> b, double kappa);

}  // namespace sslmseg::kernels
