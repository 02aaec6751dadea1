#pragma once

#include <vector>

#include "sslmseg/audio.hpp"
#include "sslmseg/feature_matrix.hpp"
#include "sslmseg/params.hpp"

namespace sslmseg {

/// Periodic Hann window, w[n] = 0.5 - 0.5 cos(2 pi n / N).
std::vector<double> hann_window(int n);

/// One-sided STFT magnitudes [window/2+1 x frames], no centre padding:
/// frames = floor((len - window) / hop) + 1.
FeatureMatrix stft_magnitude(const AudioBuffer& audio, const PipelineParams& params);

/// Triangular mel filters on the HTK mel scale, unit peak, [n_mels x n_bins].
struct MelFilterbank {
  std::size_t n_mels = 0;
  std::size_t n_bins = 0;
  std::vector<double> weights;
  std::vector<double> centers_hz;
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);
MelFilterbank mel_filterbank(const PipelineParams& params);

/// 20 log10(mel + a_floor), clamped below at params.floor_db, where a_floor is
/// the linear amplitude of the floor. Silence maps exactly to the floor.
float amplitude_to_db(double amplitude, double floor_db);
double db_to_amplitude(double db);

FeatureMatrix mel_log_spectrogram(const AudioBuffer& audio, const PipelineParams& params);
FeatureMatrix mel_log_from_stft(const FeatureMatrix& stft, const PipelineParams& params);

/// Pitch class (C = 0 ... B = 11) of the nearest 12-TET pitch, A4 = 440 Hz.
int pitch_class(double hz);

/// 12 x frames chroma: each row sums the magnitudes of every non-DC bin whose
/// nearest pitch class is that row.
FeatureMatrix chroma_project(const FeatureMatrix& stft, const PipelineParams& params);

/// Ceil-mode max pooling along time; the ragged tail is pooled over fewer frames.
FeatureMatrix max_pool_time(const FeatureMatrix& m, int factor);

}  // namespace sslmseg
