#include "sslmseg/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sslmseg/error.hpp"
#include "sslmseg/kernels.hpp"

namespace sslmseg {

std::vector<double> hann_window(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  return w;
}

FeatureMatrix stft_magnitude(const AudioBuffer& audio, const PipelineParams& params) {
  if (audio.sample_rate != params.sample_rate) {
    throw DomainError("audio sample rate " + std::to_string(audio.sample_rate) +
                      " does not match pipeline rate " + std::to_string(params.sample_rate));
  }
  const auto window = static_cast<std::size_t>(params.window_samples);
  const auto hop = static_cast<std::size_t>(params.hop_samples());
  if (audio.samples.size() < window) {
    throw InputTooShortError("audio shorter than one analysis window (" +
                             std::to_string(audio.samples.size()) + " < " +
                             std::to_string(window) + " samples)");
  }
  const std::size_t n_frames = (audio.samples.size() - window) / hop + 1;
  const std::size_t n_bins = window / 2 + 1;
  FeatureMatrix out(n_bins, n_frames, FeatureKind::stft_mag, params.base_hop_seconds());
  const auto hann = hann_window(params.window_samples);
  kernels::omp::stft_magnitude({audio.samples, hann, hop, n_frames, out.values});
  return out;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank mel_filterbank(const PipelineParams& params) {
  MelFilterbank fb;
  fb.n_mels = static_cast<std::size_t>(params.n_mels);
  fb.n_bins = static_cast<std::size_t>(params.window_samples / 2 + 1);
  fb.weights.assign(fb.n_mels * fb.n_bins, 0.0);

  const double mel_lo = hz_to_mel(params.fmin_hz);
  const double mel_hi = hz_to_mel(params.fmax_hz);
  std::vector<double> edges(fb.n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(fb.n_mels + 1));
  }
  fb.centers_hz.assign(edges.begin() + 1, edges.end() - 1);

  const double bin_hz = static_cast<double>(params.sample_rate) / params.window_samples;
  for (std::size_t m = 0; m < fb.n_mels; ++m) {
    const double lo = edges[m];
    const double c = edges[m + 1];
    const double hi = edges[m + 2];
    for (std::size_t k = 0; k < fb.n_bins; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      const double w = std::min((f - lo) / (c - lo), (hi - f) / (hi - c));
      if (w > 0.0) fb.weights[m * fb.n_bins + k] = w;
    }
  }
  return fb;
}

float amplitude_to_db(double amplitude, double floor_db) {
  if (!(amplitude > 0.0)) return static_cast<float>(floor_db);
  const double db = 20.0 * std::log10(amplitude + db_to_amplitude(floor_db));
  return static_cast<float>(db < floor_db ? floor_db : db);
}

double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

FeatureMatrix mel_log_from_stft(const FeatureMatrix& stft, const PipelineParams& params) {
  const auto fb = mel_filterbank(params);
  if (stft.rows != fb.n_bins) {
    throw DimensionError("STFT has " + std::to_string(stft.rows) + " bins, filterbank expects " +
                         std::to_string(fb.n_bins));
  }
  FeatureMatrix out(fb.n_mels, stft.cols, FeatureKind::mls, stft.hop_seconds);
  out.pool_factor = stft.pool_factor;
  out.pad_frames = stft.pad_frames;
  kernels::omp::mel_db(
      {fb.weights, fb.n_mels, stft.values, fb.n_bins, stft.cols, params.floor_db, out.values});
  return out;
}

FeatureMatrix mel_log_spectrogram(const AudioBuffer& audio, const PipelineParams& params) {
  return mel_log_from_stft(stft_magnitude(audio, params), params);
}

int pitch_class(double hz) {
  const double midi = 69.0 + 12.0 * std::log2(hz / 440.0);
  const long nearest = std::lround(midi);
  return static_cast<int>(((nearest % 12) + 12) % 12);
}

FeatureMatrix chroma_project(const FeatureMatrix& stft, const PipelineParams& params) {
  if (stft.kind != FeatureKind::stft_mag) throw DomainError("chroma_project expects an STFT");
  if (stft.rows < 2) throw DimensionError("STFT needs at least two bins");
  const std::size_t n_fft = 2 * (stft.rows - 1);
  const double bin_hz = static_cast<double>(params.sample_rate) / static_cast<double>(n_fft);

  FeatureMatrix out(12, stft.cols, FeatureKind::chroma, stft.hop_seconds);
  out.pool_factor = stft.pool_factor;
  out.pad_frames = stft.pad_frames;
  for (std::size_t k = 1; k < stft.rows; ++k) {
    const auto pc = static_cast<std::size_t>(pitch_class(static_cast<double>(k) * bin_hz));
    const float* src = stft.values.data() + k * stft.cols;
    float* dst = out.values.data() + pc * out.cols;
    for (std::size_t f = 0; f < stft.cols; ++f) dst[f] += src[f];
  }
  return out;
}

FeatureMatrix max_pool_time(const FeatureMatrix& m, int factor) {
  if (factor < 1) throw DomainError("pool factor must be >= 1");
  if (factor == 1) return m;
  const auto p = static_cast<std::size_t>(factor);
  const std::size_t cols_out = (m.cols + p - 1) / p;
  FeatureMatrix out(m.rows, cols_out, m.kind, m.hop_seconds * factor);
  out.pool_factor = m.pool_factor * static_cast<std::uint32_t>(factor);
  out.pad_frames = m.pad_frames / static_cast<std::uint32_t>(factor);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const float* src = m.values.data() + r * m.cols;
    float* dst = out.values.data() + r * cols_out;
    for (std::size_t c = 0; c < cols_out; ++c) {
      const std::size_t begin = c * p;
      const std::size_t end = std::min(begin + p, m.cols);
      dst[c] = *std::max_element(src + begin, src + end);
    }
  }
  return out;
}

}  // namespace sslmseg
