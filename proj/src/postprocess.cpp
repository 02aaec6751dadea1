#include "sslmseg/postprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "sslmseg/error.hpp"
#include "sslmseg/evaluation.hpp"
#include "sslmseg/layers.hpp"

namespace sslmseg {

PredictionCurve to_prediction(std::span<const float> logits, double frame_rate, int pad_frames) {
  PredictionCurve c;
  c.frame_rate = frame_rate;
  c.pad_frames = pad_frames;
  c.probs.reserve(logits.size());
  for (float z : logits) c.probs.push_back(sigmoid<double>(z));
  return c;
}

std::vector<std::size_t> pick_peak_frames(const PredictionCurve& curve, double threshold) {
  if (!(curve.frame_rate > 0.0)) throw DomainError("prediction frame rate must be positive");
  const auto& p = curve.probs;
  const std::size_t n = p.size();
  std::vector<std::size_t> candidates;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && p[j + 1] == p[i]) ++j;  // plateau [i, j]
    const bool left = i == 0 || p[i - 1] < p[i];
    const bool right = j + 1 == n || p[j + 1] < p[i];
    if (left && right && p[i] >= threshold && p[i] > 0.0) candidates.push_back(i);
    i = j + 1;
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });

  std::vector<std::size_t> accepted;
  for (std::size_t c : candidates) {
    bool clear = true;
    for (std::size_t a : accepted) {
      const double gap = std::abs(static_cast<double>(c) - static_cast<double>(a)) / curve.frame_rate;
      if (gap < kPeakExclusionSeconds) {
        clear = false;
        break;
      }
    }
    if (clear) accepted.push_back(c);
  }
  std::sort(accepted.begin(), accepted.end());
  return accepted;
}

BoundarySet pick_peaks(const PredictionCurve& curve, double threshold) {
  BoundarySet out;
  for (std::size_t f : pick_peak_frames(curve, threshold)) {
    const double t = (static_cast<double>(f) - curve.pad_frames) / curve.frame_rate;
    if (t >= 0.0) out.times.push_back(t);
  }
  return out;
}

SweepResult sweep_threshold(const std::vector<CurveWithReference>& data, double tolerance,
                            double beta, double step) {
  if (data.empty()) throw DomainError("threshold sweep needs at least one track");
  if (!(step > 0.0 && step <= 1.0)) throw DomainError("sweep step must be in (0, 1]");
  const auto n_steps = static_cast<std::size_t>(std::llround(1.0 / step));
  SweepResult result;
  result.table.resize(n_steps + 1);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k <= n_steps; ++k) {
    SweepRow row;
    row.threshold = std::min(1.0, static_cast<double>(k) * step);
    for (const auto& d : data) {
      const auto s = prf(match_boundaries(d.reference, pick_peaks(d.curve, row.threshold), tolerance),
                         beta);
      row.precision += s.precision;
      row.recall += s.recall;
      row.f_beta += s.f;
    }
    const auto n = static_cast<double>(data.size());
    row.precision /= n;
    row.recall /= n;
    row.f_beta /= n;
    result.table[k] = row;
  }
  result.best_threshold = result.table.front().threshold;
  result.best_f = result.table.front().f_beta;
  for (const auto& row : result.table) {
    if (row.f_beta > result.best_f) {
      result.best_f = row.f_beta;
      result.best_threshold = row.threshold;
    }
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "threshold,precision,recall,f_beta\n";
  char buf[128];
  for (const auto& r : result.table) {
    std::snprintf(buf, sizeof(buf), "%.3f,%.6f,%.6f,%.6f\n", r.threshold, r.precision, r.recall,
                  r.f_beta);
    out += buf;
  }
  return out;
}

SweepResult parse_sweep_csv(std::string_view text) {
  SweepResult result;
  bool header = true;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    double v[4];
    for (int k = 0; k < 4; ++k) {
      const auto comma = line.find(',');
      const auto tok = line.substr(0, comma);
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v[k]);
      if (ec != std::errc() || (k < 3 && comma == std::string_view::npos)) {
        throw FormatError("sweep table line " + std::to_string(line_no) + " is malformed");
      }
      line = comma == std::string_view::npos ? std::string_view{} : line.substr(comma + 1);
    }
    result.table.push_back({v[0], v[1], v[2], v[3]});
    if (result.table.size() == 1 || v[3] > result.best_f) {
      result.best_f = v[3];
      result.best_threshold = v[0];
    }
  }
  return result;
}

}  // namespace sslmseg
