#include "sslmseg/pipeline.hpp"

#include <algorithm>

#include "sslmseg/annotations.hpp"
#include "sslmseg/byte_io.hpp"
#include "sslmseg/dsp.hpp"
#include "sslmseg/error.hpp"
#include "sslmseg/matrix_io.hpp"
#include "sslmseg/model.hpp"
#include "sslmseg/random.hpp"
#include "sslmseg/sslm.hpp"

namespace sslmseg {

AudioBuffer prepare_audio(AudioBuffer audio, const PipelineParams& params) {
  if (audio.sample_rate == params.sample_rate) return audio;
  return resample(audio, params.sample_rate);
}

FeatureMatrix align_frames(const FeatureMatrix& m, std::size_t cols) {
  if (m.cols == cols) return m;
  if (m.cols == 0) throw DimensionError("cannot align an empty matrix");
  FeatureMatrix out(m.rows, cols, m.kind, m.hop_seconds);
  out.pool_factor = m.pool_factor;
  out.pad_frames = m.pad_frames;
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out.values[r * cols + c] = m.at(r, std::min(c, m.cols - 1));
  }
  return out;
}

std::vector<FeatureMatrix> compute_inputs(const AudioBuffer& audio, const RunConfig& config) {
  const auto& params = config.params;
  const auto stft = stft_magnitude(audio, params);
  const auto mls = mel_log_from_stft(stft, params);
  const std::size_t frames = (stft.cols + static_cast<std::size_t>(params.pool) - 1) /
                             static_cast<std::size_t>(params.pool);

  const auto specs = config.inputs();
  std::vector<FeatureMatrix> out;
  out.reserve(specs.size());
  FeatureMatrix mfcc_front, chroma_front;
  for (const auto& spec : specs) {
    if (spec.is_mls) {
      out.push_back(max_pool_time(mls, params.pool));
      continue;
    }
    const SslmConfig sc{spec.sslm.feature, spec.sslm.metric, config.pooling, params};
    auto& front = spec.sslm.feature == FeatureType::mfcc_like ? mfcc_front : chroma_front;
    if (front.cols == 0) {
      const auto& base = spec.sslm.feature == FeatureType::mfcc_like ? mls : stft;
      front = max_pool_time(pad_noise_floor(base, params), sc.pre_pool());
    }
    auto r = sslm_from_front_end(front, sc);
    r.pad_frames = 0;
    out.push_back(align_frames(r, frames));
  }
  return out;
}

std::uint64_t input_noise_seed(const std::string& track_id, const InputSpec& input) {
  return mix_seed(byte_io::fnv1a(track_id + "/" + input.name()));
}

std::vector<FeatureMatrix> network_inputs(const AudioBuffer& audio, const RunConfig& config,
                                          const std::string& track_id) {
  auto raw = compute_inputs(audio, config);
  const auto specs = config.inputs();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = finalize_input(raw[i], config.params.final_pad, input_noise_seed(track_id, specs[i]));
  }
  return raw;
}

TrainExample make_example(const std::string& track_id, std::span<const FeatureMatrix> inputs,
                          const BoundarySet& reference, const PipelineParams& params) {
  TrainExample ex;
  ex.id = track_id;
  ex.input = stack_inputs(inputs);
  ex.reference = reference;
  ex.frame_rate = params.final_frame_rate();
  ex.pad_frames = params.final_pad;
  const auto curve = to_target_curve(reference, static_cast<std::size_t>(ex.input.w), ex.frame_rate,
                                     ex.pad_frames);
  ex.target.assign(curve.values.begin(), curve.values.end());
  return ex;
}

std::filesystem::path feature_path(const std::filesystem::path& dir, const std::string& track_id,
                                   const InputSpec& input) {
  return dir / (track_id + "." + input.name() + ".mat");
}

std::vector<FeatureMatrix> load_network_inputs(const std::filesystem::path& dir,
                                               const std::string& track_id,
                                               const RunConfig& config) {
  std::vector<FeatureMatrix> out;
  for (const auto& spec : config.inputs()) {
    const auto path = feature_path(dir, track_id, spec);
    if (!std::filesystem::exists(path)) {
      throw IoError("track " + track_id + ": missing feature matrix " + path.string() +
                    " (run the features command first)");
    }
    out.push_back(load_matrix(path));
    if (out.back().kind != FeatureKind::net_input) {
      throw FormatError("track " + track_id + ": " + path.string() + " is not a network input");
    }
  }
  return out;
}

}  // namespace sslmseg
