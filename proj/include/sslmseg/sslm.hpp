#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sslmseg/audio.hpp"
#include "sslmseg/distance.hpp"
#include "sslmseg/feature_matrix.hpp"
#include "sslmseg/params.hpp"

namespace sslmseg {

enum class FeatureType { mfcc_like, chroma };
enum class Pooling { pool6, pool2_3 };

struct SslmConfig {
  FeatureType feature = FeatureType::mfcc_like;
  Metric metric = Metric::cosine;
  Pooling pooling = Pooling::pool6;
  PipelineParams params;

  /// Time-pool factor applied before the distance computation.
  int pre_pool() const { return pooling == Pooling::pool6 ? params.pool : params.pool1; }
  /// Number of lag bins, floor(lag_frames / pre_pool).
  std::size_t lag_bins() const {
    return static_cast<std::size_t>(params.lag_frames() / pre_pool());
  }
};

std::string to_string(FeatureType f);
std::string to_string(Metric m);
std::string to_string(Pooling p);

enum class SeriesOrigin { dct_of_mls, chroma_of_stft };

/// Column-major series of feature vectors (one contiguous column per frame).
struct LagFeatureSeries {
  std::size_t dims = 0;
  std::size_t frames = 0;
  std::vector<double> data;
  int stack = 1;
  SeriesOrigin origin = SeriesOrigin::dct_of_mls;

  std::span<const double> col(std::size_t i) const {
    return std::span<const double>(data).subspan(i * dims, dims);
  }
};

/// D and eps, both [frames x lag_bins] row-major; column l-1 holds lag l.
struct DistanceLagMatrix {
  std::size_t frames = 0;
  std::size_t lag_bins = 0;
  std::vector<double> distances;
  std::vector<double> epsilon;
  double hop_seconds = 0.0;
  std::uint32_t pool_factor = 1;

  double d(std::size_t i, std::size_t lag) const { return distances[i * lag_bins + lag - 1]; }
  double eps(std::size_t i, std::size_t lag) const { return epsilon[i * lag_bins + lag - 1]; }
};

/// Prepends round(L sr / hop) constant frames: floor_db for an MLS, the
/// linear amplitude of floor_db for an STFT.
FeatureMatrix pad_noise_floor(const FeatureMatrix& features, const PipelineParams& params);

/// Coefficients smaller than this fraction of their summed term magnitudes
/// are set to zero.
inline constexpr double kDctSnap = 1e-12;

/// Orthonormal DCT-II of every frame, coefficients 2..P kept.
LagFeatureSeries dct_features(const FeatureMatrix& mls);
LagFeatureSeries chroma_series(const FeatureMatrix& chroma);

/// Column i of the output is [col_i ; col_{i+m}].
LagFeatureSeries stack_frames(const LagFeatureSeries& series, int m);

DistanceLagMatrix lag_distances(const LagFeatureSeries& series, std::size_t lag_bins,
                                Metric metric);

/// Fills eps for rows >= first_row with the kappa-quantile of D rows i and i-l.
void equalize(DistanceLagMatrix& dlm, double kappa, std::size_t first_row = 0);

/// Drops the first `rows` time frames of D and eps.
DistanceLagMatrix crop_frames(const DistanceLagMatrix& dlm, std::size_t rows);

inline constexpr double kEpsilonFloor = 1e-9;
inline constexpr double kRatioCap = 50.0;

/// sigma(1 - D/eps) with the degenerate-eps guard; the ratio is capped at 50 so
/// every output stays strictly inside (0, 1).
double recurrence_value(double distance, double epsilon);

/// [lag_bins x frames] matrix of recurrence values (kind sslm).
FeatureMatrix recurrence(const DistanceLagMatrix& dlm);

/// Padded and pre-pooled front end: MLS (mfcc_like) or STFT (chroma).
FeatureMatrix sslm_front_end(const AudioBuffer& audio, const SslmConfig& config);
/// Feature series of a pooled front end (DCT or chroma), before stacking.
LagFeatureSeries sslm_series(const FeatureMatrix& front_end, const SslmConfig& config);

FeatureMatrix compute_sslm(const AudioBuffer& audio, const SslmConfig& config);
FeatureMatrix sslm_from_front_end(const FeatureMatrix& front_end, const SslmConfig& config);

/// Linear-interpolation quantile (inclusive definition) of unsorted values.
double quantile(std::vector<double> values, double kappa);

/// Pads `pad` pink-noise frames at both ends (Voss-McCartney, scaled to each
/// row's value range) and standardises every row to zero mean, unit variance.
FeatureMatrix finalize_input(const FeatureMatrix& m, int pad, std::uint64_t seed);

/// Voss-McCartney pink noise in [0, 1).
std::vector<double> pink_noise(std::size_t n, std::uint64_t seed);

}  // namespace sslmseg
