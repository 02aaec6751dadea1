#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sslmseg/boundary_set.hpp"

namespace sslmseg {

/// Parses SALAMI "functions" text ("seconds<TAB>label" per line). Times are
/// sorted and deduplicated, then the earliest one (the start-of-file tag) is
/// dropped.
BoundarySet parse_functions_text(std::string_view text);
BoundarySet parse_functions_file(const std::filesystem::path& path);

/// Inverse of parse_functions_text: a leading "0.0 Silence" tag followed by
/// one labelled line per boundary. All times must be > 0.
std::string serialize_functions(const BoundarySet& b);

/// Plain boundary list, one time in seconds per line.
BoundarySet parse_boundary_list(std::string_view text);
std::string serialize_boundary_list(const BoundarySet& b);

struct TargetCurve {
  std::vector<double> values;
  double frame_rate = 0.0;
  int pad_frames = 0;
  std::vector<double> dropped;  // boundaries outside the track
};

inline constexpr double kTargetSigmaSeconds = 0.1;

/// Unit-peak Gaussians (sigma = 0.1 s in frames) centred on
/// round(t * frame_rate) + pad, combined by per-frame max. `n_frames` counts
/// the padded network-input frames.
TargetCurve to_target_curve(const BoundarySet& b, std::size_t n_frames, double frame_rate,
                            int pad);

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

/// Seeded shuffle, then train = max(1, floor(0.65 n)), validation =
/// max(1, floor(0.15 n)), test = remainder.
DatasetSplit split_dataset(std::vector<std::string> track_ids, std::uint64_t seed);

std::string serialize_manifest(const DatasetSplit& split);
DatasetSplit parse_manifest(std::string_view text);

}  // namespace sslmseg
