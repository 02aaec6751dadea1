#pragma once

#include <span>
#include <string>
#include <vector>

#include "sslmseg/boundary_set.hpp"

namespace sslmseg {

struct PredictionCurve {
  std::vector<double> probs;
  double frame_rate = 0.0;
  int pad_frames = 0;
};

/// Sigmoid of every logit.
PredictionCurve to_prediction(std::span<const float> logits, double frame_rate, int pad_frames);

inline constexpr double kPeakExclusionSeconds = 6.0;
inline constexpr double kSweepStep = 0.005;

/// Local maxima at or above `threshold`, accepted highest first unless an
/// accepted peak lies closer than 6 s. A plateau counts once, at its first frame.
BoundarySet pick_peaks(const PredictionCurve& curve, double threshold);
/// Frames accepted by pick_peaks, before the conversion to seconds.
std::vector<std::size_t> pick_peak_frames(const PredictionCurve& curve, double threshold);

struct SweepRow {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
};

struct SweepResult {
  double best_threshold = 0.0;
  double best_f = 0.0;
  std::vector<SweepRow> table;
};

struct CurveWithReference {
  PredictionCurve curve;
  BoundarySet reference;
};

/// Mean P/R/F_beta over tracks for every threshold k * step in [0, 1]; the
/// optimum is the smallest threshold reaching the highest mean F_beta.
SweepResult sweep_threshold(const std::vector<CurveWithReference>& data, double tolerance,
                            double beta, double step = kSweepStep);

std::string sweep_csv(const SweepResult& result);
SweepResult parse_sweep_csv(std::string_view text);

}  // namespace sslmseg
