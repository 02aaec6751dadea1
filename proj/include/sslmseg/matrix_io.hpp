#pragma once

#include <filesystem>
#include <string>

#include "sslmseg/feature_matrix.hpp"

namespace sslmseg {

/// Little-endian binary layout:
///   magic "SSLMSEGM" | rows u32 | cols u32 | dtype u32 (1 = f32) |
///   hop_seconds f64 | pool_factor u32 | pad_frames u32 | kind u32 |
///   rows*cols f32 row-major payload
inline constexpr char kMatrixMagic[8] = {'S', 'S', 'L', 'M', 'S', 'E', 'G', 'M'};
inline constexpr std::uint32_t kDtypeFloat32 = 1;
inline constexpr std::size_t kMatrixHeaderBytes = 40;

std::string encode_matrix(const FeatureMatrix& m);
FeatureMatrix decode_matrix(const std::string& bytes);

void save_matrix(const FeatureMatrix& m, const std::filesystem::path& path);
FeatureMatrix load_matrix(const std::filesystem::path& path);

}  // namespace sslmseg
