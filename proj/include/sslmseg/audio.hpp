#pragma once

#include <filesystem>
#include <vector>

namespace sslmseg {

struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate = 0;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

enum class WavEncoding { pcm16, float32 };

/// Reads a RIFF/WAVE file (PCM 16-bit or IEEE float 32-bit, mono or stereo).
/// Stereo input is downmixed by the channel mean.
AudioBuffer read_wav(const std::filesystem::path& path);

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio,
               WavEncoding encoding = WavEncoding::float32);

/// Linear-interpolation resampler. The last source sample is held past the end.
AudioBuffer resample(const AudioBuffer& audio, int target_rate);

}  // namespace sslmseg
