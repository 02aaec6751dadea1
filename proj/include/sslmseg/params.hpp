#pragma once

#include <cmath>

namespace sslmseg {

/// Analysis constants shared by every pipeline stage.
struct PipelineParams {
  int sample_rate = 44100;
  int window_samples = 2048;  // 46 ms
  double overlap = 0.5;
  int n_mels = 80;
  double fmin_hz = 80.0;
  double fmax_hz = 16000.0;
  double lag_seconds = 14.0;
  int pool = 6;   // 6pool
  int pool1 = 2;  // 2pool3, before distances
  int pool2 = 3;  // 2pool3, after equalization
  int stack = 2;
  double quantile = 0.1;
  int final_pad = 50;
  double floor_db = -70.0;

  int hop_samples() const {
    return static_cast<int>(std::lround(window_samples * (1.0 - overlap)));
  }
  double base_hop_seconds() const { return static_cast<double>(hop_samples()) / sample_rate; }
  /// Lag horizon in STFT frames, round(L * sr / hop).
  int lag_frames() const {
    return static_cast<int>(std::lround(lag_seconds * sample_rate / hop_samples()));
  }
  /// Frame rate of network inputs and targets (after the full time pooling).
  double final_frame_rate() const {
    return static_cast<double>(sample_rate) / (static_cast<double>(hop_samples()) * pool);
  }
};

/// Peak-picking threshold for the MLS-only network.
inline constexpr double kDefaultThresholdMls = 0.205;

}  // namespace sslmseg
