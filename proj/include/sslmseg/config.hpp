#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sslmseg/params.hpp"
#include "sslmseg/sslm.hpp"

namespace sslmseg {

struct SslmSelection {
  FeatureType feature = FeatureType::mfcc_like;
  Metric metric = Metric::euclidean;
  friend bool operator==(const SslmSelection&, const SslmSelection&) = default;
};

/// One network input: the MLS or one of the four SSLM variants.
struct InputSpec {
  bool is_mls = true;
  SslmSelection sslm;
  std::string name() const;  // "mls", "sslm-mfcc-euclidean", ...
};

struct RunConfig {
  PipelineParams params;
  bool include_mls = true;
  std::vector<SslmSelection> sslms;
  Pooling pooling = Pooling::pool6;

  int epochs = 100;
  std::uint64_t seed = 1;
  std::uint64_t split_seed = 1;
  double threshold = kDefaultThresholdMls;
  double tolerance = 0.5;
  double beta = 1.0;
  double learning_rate = 0.001;

  std::filesystem::path audio_dir = "audio";
  std::filesystem::path annotations_dir = "annotations";
  std::filesystem::path features_dir = "features";
  std::filesystem::path run_dir = "run";

  /// Selected inputs in stacking order: MLS first, then SSLMs as listed.
  std::vector<InputSpec> inputs() const;
  /// Throws DomainError when nothing is selected or a value is out of range.
  void validate() const;

  /// Sorted "key = value" lines covering every field.
  std::string canonical() const;
  /// Hash of the settings that change feature matrices or the network shape.
  std::uint64_t feature_hash() const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& config);

/// Replaces path fields from SSLMSEG_AUDIO_DIR, SSLMSEG_ANNOTATIONS_DIR,
/// SSLMSEG_FEATURES_DIR and SSLMSEG_RUN_DIR when set.
void apply_env_overrides(RunConfig& config);

SslmSelection parse_sslm_selection(std::string_view name);
std::string to_string(const SslmSelection& s);
Pooling parse_pooling(std::string_view name);

std::string hash_hex(std::uint64_t h);

}  // namespace sslmseg
