#include "sslmseg/sslm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "sslmseg/dsp.hpp"
#include "sslmseg/error.hpp"
#include "sslmseg/kernels.hpp"
#include "sslmseg/random.hpp"

namespace sslmseg {

std::string to_string(FeatureType f) { return f == FeatureType::mfcc_like ? "mfcc" : "chroma"; }
std::string to_string(Metric m) { return m == Metric::euclidean ? "euclidean" : "cosine"; }
std::string to_string(Pooling p) { return p == Pooling::pool6 ? "6pool" : "2pool3"; }

FeatureMatrix pad_noise_floor(const FeatureMatrix& features, const PipelineParams& params) {
  float value = 0.0f;
  if (features.kind == FeatureKind::mls) {
    value = static_cast<float>(params.floor_db);
  } else if (features.kind == FeatureKind::stft_mag) {
    value = static_cast<float>(db_to_amplitude(params.floor_db));
  } else {
    throw DomainError("pad_noise_floor expects an MLS or STFT, got " +
                      std::string(to_string(features.kind)));
  }
  const auto pad = static_cast<std::size_t>(params.lag_frames());
  if (pad == 0) return features;

  FeatureMatrix out(features.rows, features.cols + pad, features.kind, features.hop_seconds, value);
  out.pool_factor = features.pool_factor;
  out.pad_frames = features.pad_frames + static_cast<std::uint32_t>(pad);
  for (std::size_t r = 0; r < features.rows; ++r) {
    std::copy_n(features.values.begin() + static_cast<std::ptrdiff_t>(r * features.cols),
                features.cols, out.values.begin() + static_cast<std::ptrdiff_t>(r * out.cols + pad));
  }
  return out;
}

LagFeatureSeries dct_features(const FeatureMatrix& mls) {
  if (mls.kind != FeatureKind::mls) throw DomainError("dct_features expects an MLS");
  const std::size_t P = mls.rows;
  if (P < 2) throw DimensionError("DCT needs at least two bands");

  // Orthonormal DCT-II basis rows k = 1..P-1 (the DC row is omitted).
  std::vector<double> basis((P - 1) * P);
  const double scale = std::sqrt(2.0 / static_cast<double>(P));
  for (std::size_t k = 1; k < P; ++k) {
    for (std::size_t n = 0; n < P; ++n) {
      basis[(k - 1) * P + n] =
          scale * std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(n) + 0.5) /
                           static_cast<double>(P));
    }
  }

  LagFeatureSeries out;
  out.dims = P - 1;
  out.frames = mls.cols;
  out.origin = SeriesOrigin::dct_of_mls;
  out.data.assign(out.dims * out.frames, 0.0);
  std::vector<double> column(P);
  for (std::size_t f = 0; f < mls.cols; ++f) {
    for (std::size_t n = 0; n < P; ++n) column[n] = mls.at(n, f);
    double* dst = out.data.data() + f * out.dims;
    for (std::size_t k = 0; k + 1 < P; ++k) {
      const double* b = basis.data() + k * P;
      double acc = 0.0;
      double mag = 0.0;
      for (std::size_t n = 0; n < P; ++n) {
        acc += b[n] * column[n];
        mag += std::abs(b[n] * column[n]);
      }
      // A constant frame (e.g. the noise-floor pad) yields pure rounding noise here.
      dst[k] = std::abs(acc) <= kDctSnap * mag ? 0.0 : acc;
    }
  }
  return out;
}

LagFeatureSeries chroma_series(const FeatureMatrix& chroma) {
  if (chroma.kind != FeatureKind::chroma) throw DomainError("chroma_series expects chroma");
  LagFeatureSeries out;
  out.dims = chroma.rows;
  out.frames = chroma.cols;
  out.origin = SeriesOrigin::chroma_of_stft;
  out.data.resize(out.dims * out.frames);
  for (std::size_t f = 0; f < chroma.cols; ++f) {
    for (std::size_t r = 0; r < chroma.rows; ++r) out.data[f * out.dims + r] = chroma.at(r, f);
  }
  return out;
}

LagFeatureSeries stack_frames(const LagFeatureSeries& series, int m) {
  if (m < 1) throw DomainError("stacking factor must be >= 1");
  const auto step = static_cast<std::size_t>(m);
  LagFeatureSeries out;
  out.dims = series.dims * 2;
  out.frames = series.frames > step ? series.frames - step : 0;
  out.stack = m;
  out.origin = series.origin;
  out.data.resize(out.dims * out.frames);
  for (std::size_t i = 0; i < out.frames; ++i) {
    const auto a = series.col(i);
    const auto b = series.col(i + step);
    double* dst = out.data.data() + i * out.dims;
    std::copy(a.begin(), a.end(), dst);
    std::copy(b.begin(), b.end(), dst + series.dims);
  }
  return out;
}

DistanceLagMatrix lag_distances(const LagFeatureSeries& series, std::size_t lag_bins,
                                Metric metric) {
  if (lag_bins < 1) throw DomainError("lag_bins must be >= 1");
  if (series.frames < lag_bins + 1) {
    throw InputTooShortError("series has " + std::to_string(series.frames) +
                             " frames, lag distances need at least " +
                             std::to_string(lag_bins + 1));
  }
  DistanceLagMatrix out;
  out.frames = series.frames;
  out.lag_bins = lag_bins;
  out.distances.assign(out.frames * lag_bins, 0.0);
  kernels::omp::lag_distances(
      {{series.data, series.dims, series.frames}, lag_bins, metric, out.distances});
  return out;
}

void equalize(DistanceLagMatrix& dlm, double kappa, std::size_t first_row) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw DomainError("quantile must lie in (0, 1)");
  dlm.epsilon.assign(dlm.distances.size(), 0.0);
  kernels::omp::equalize(
      {dlm.distances, dlm.frames, dlm.lag_bins, kappa, std::min(first_row, dlm.frames), dlm.epsilon});
}

DistanceLagMatrix crop_frames(const DistanceLagMatrix& dlm, std::size_t rows) {
  DistanceLagMatrix out;
  const std::size_t drop = std::min(rows, dlm.frames);
  out.frames = dlm.frames - drop;
  out.lag_bins = dlm.lag_bins;
  out.hop_seconds = dlm.hop_seconds;
  out.pool_factor = dlm.pool_factor;
  const auto offset = static_cast<std::ptrdiff_t>(drop * dlm.lag_bins);
  out.distances.assign(dlm.distances.begin() + offset, dlm.distances.end());
  if (!dlm.epsilon.empty()) out.epsilon.assign(dlm.epsilon.begin() + offset, dlm.epsilon.end());
  return out;
}

double recurrence_value(double distance, double epsilon) {
  double ratio = 0.0;
  if (epsilon < kEpsilonFloor) {
    ratio = distance < kEpsilonFloor ? 0.0 : kRatioCap;
  } else {
    ratio = std::min(distance / epsilon, kRatioCap);
  }
  const double r = 1.0 / (1.0 + std::exp(-(1.0 - ratio)));
  return std::isnan(r) ? 0.0 : r;
}

FeatureMatrix recurrence(const DistanceLagMatrix& dlm) {
  if (dlm.epsilon.size() != dlm.distances.size()) {
    throw DimensionError("recurrence needs an equalized distance matrix");
  }
  FeatureMatrix out(dlm.lag_bins, dlm.frames, FeatureKind::sslm, dlm.hop_seconds);
  out.pool_factor = dlm.pool_factor;
  for (std::size_t i = 0; i < dlm.frames; ++i) {
    for (std::size_t l = 1; l <= dlm.lag_bins; ++l) {
      out.at(l - 1, i) = static_cast<float>(recurrence_value(dlm.d(i, l), dlm.eps(i, l)));
    }
  }
  return out;
}

FeatureMatrix sslm_front_end(const AudioBuffer& audio, const SslmConfig& config) {
  const auto& params = config.params;
  FeatureMatrix base = config.feature == FeatureType::mfcc_like
                           ? mel_log_spectrogram(audio, params)
                           : stft_magnitude(audio, params);
  return max_pool_time(pad_noise_floor(base, params), config.pre_pool());
}

LagFeatureSeries sslm_series(const FeatureMatrix& front_end, const SslmConfig& config) {
  return config.feature == FeatureType::mfcc_like
             ? dct_features(front_end)
             : chroma_series(chroma_project(front_end, config.params));
}

FeatureMatrix sslm_from_front_end(const FeatureMatrix& front_end, const SslmConfig& config) {
  const auto& params = config.params;
  const auto stacked = stack_frames(sslm_series(front_end, config), params.stack);
  const std::size_t lag_bins = config.lag_bins();
  if (stacked.frames <= lag_bins) {
    throw InputTooShortError("audio too short for the lag horizon: " +
                             std::to_string(stacked.frames) + " stacked frames, " +
                             std::to_string(lag_bins) + " lag bins");
  }
  auto dlm = lag_distances(stacked, lag_bins, config.metric);
  dlm.hop_seconds = front_end.hop_seconds;
  dlm.pool_factor = front_end.pool_factor;
  equalize(dlm, params.quantile, lag_bins);
  FeatureMatrix r = recurrence(crop_frames(dlm, lag_bins));
  if (config.pooling == Pooling::pool2_3) r = max_pool_time(r, params.pool2);
  return r;
}

FeatureMatrix compute_sslm(const AudioBuffer& audio, const SslmConfig& config) {
  return sslm_from_front_end(sslm_front_end(audio, config), config);
}

double quantile(std::vector<double> values, double kappa) {
  if (values.empty()) throw DomainError("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double h = kappa * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0 || lo + 1 >= values.size()) return values[lo];
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::vector<double> pink_noise(std::size_t n, std::uint64_t seed) {
  constexpr int kRows = 16;
  Rng rng(seed);
  double rows[kRows];
  double sum = 0.0;
  for (double& r : rows) {
    r = rng.uniform();
    sum += r;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Row k is refreshed every 2^k steps (trailing-zero count of the counter).
    const std::uint64_t counter = i + 1;
    const int k = std::min(std::countr_zero(counter), kRows - 1);
    sum -= rows[k];
    rows[k] = rng.uniform();
    sum += rows[k];
    out[i] = (sum + rng.uniform()) / (kRows + 1);
  }
  return out;
}

FeatureMatrix finalize_input(const FeatureMatrix& m, int pad, std::uint64_t seed) {
  if (pad < 0) throw DomainError("padding must be non-negative");
  const auto g = static_cast<std::size_t>(pad);
  FeatureMatrix out(m.rows, m.cols + 2 * g, FeatureKind::net_input, m.hop_seconds);
  out.pool_factor = m.pool_factor;
  out.pad_frames = static_cast<std::uint32_t>(pad);

  std::vector<double> row(out.cols);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const float* src = m.values.data() + r * m.cols;
    const auto [mn, mx] = m.cols > 0 ? std::minmax_element(src, src + m.cols)
                                     : std::pair<const float*, const float*>{nullptr, nullptr};
    const double lo = mn ? *mn : 0.0;
    const double hi = mx ? *mx : 0.0;
    const auto noise = pink_noise(2 * g, mix_seed(seed + r));
    for (std::size_t c = 0; c < g; ++c) {
      row[c] = lo + (hi - lo) * noise[c];
      row[g + m.cols + c] = lo + (hi - lo) * noise[g + c];
    }
    for (std::size_t c = 0; c < m.cols; ++c) row[g + c] = src[c];

    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(row.size());
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= static_cast<double>(row.size());
    float* dst = out.values.data() + r * out.cols;
    if (var < 1e-12) {
      std::fill(dst, dst + out.cols, 0.0f);
      continue;
    }
    const double inv_std = 1.0 / std::sqrt(var);
    for (std::size_t c = 0; c < out.cols; ++c) dst[c] = static_cast<float>((row[c] - mean) * inv_std);
  }
  return out;
}

}  // namespace sslmseg
