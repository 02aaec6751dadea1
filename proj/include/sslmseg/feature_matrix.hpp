#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace sslmseg {

enum class FeatureKind : std::uint32_t {
  stft_mag = 0,
  mls = 1,
  chroma = 2,
  lag_features = 3,
  sslm = 4,
  net_input = 5,
};

std::string_view to_string(FeatureKind kind);

/// Row-major [bins x frames] matrix with time-axis metadata.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;
  double hop_seconds = 0.0;
  std::uint32_t pool_factor = 1;
  std::uint32_t pad_frames = 0;
  FeatureKind kind = FeatureKind::stft_mag;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c, FeatureKind k, double hop, float fill = 0.0f)
      : rows(r), cols(c), values(r * c, fill), hop_seconds(hop), kind(k) {}

  float& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  float at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

  bool all_finite() const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

}  // namespace sslmseg
