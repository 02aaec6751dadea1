#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sslmseg/audio.hpp"
#include "sslmseg/boundary_set.hpp"
#include "sslmseg/config.hpp"
#include "sslmseg/feature_matrix.hpp"
#include "sslmseg/train.hpp"

namespace sslmseg {

/// Resamples to the pipeline rate when needed.
AudioBuffer prepare_audio(AudioBuffer audio, const PipelineParams& params);

/// Truncates or repeats the last column so the matrix has `cols` columns.
FeatureMatrix align_frames(const FeatureMatrix& m, std::size_t cols);

/// Unpadded matrices for every selected input, all with ceil(N / pool) frames
/// where N is the STFT frame count.
std::vector<FeatureMatrix> compute_inputs(const AudioBuffer& audio, const RunConfig& config);

/// Pink-noise seed of one input row block; fixed per track and input.
std::uint64_t input_noise_seed(const std::string& track_id, const InputSpec& input);

/// compute_inputs followed by finalize_input.
std::vector<FeatureMatrix> network_inputs(const AudioBuffer& audio, const RunConfig& config,
                                          const std::string& track_id);

TrainExample make_example(const std::string& track_id, std::span<const FeatureMatrix> inputs,
                          const BoundarySet& reference, const PipelineParams& params);

std::filesystem::path feature_path(const std::filesystem::path& dir, const std::string& track_id,
                                   const InputSpec& input);

/// Loads the finalized matrices of a track; throws IoError naming the track
/// when one is missing.
std::vector<FeatureMatrix> load_network_inputs(const std::filesystem::path& dir,
                                               const std::string& track_id,
                                               const RunConfig& config);

}  // namespace sslmseg
