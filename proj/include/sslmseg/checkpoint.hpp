#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "sslmseg/model.hpp"

namespace sslmseg {

struct Checkpoint {
  std::uint64_t config_hash = 0;
  std::uint32_t epoch = 0;
  Model<float> model;
  AdamState<float> adam;
};

/// "SSLMSEGC", version, config hash, epoch, input height, Adam step and
/// hyper-parameters, then named f32 tensors (weights, then Adam moments).
std::string encode_checkpoint(const Checkpoint& c);
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
/// Throws CompatibilityError when the stored hash differs from `expected_hash`.
Checkpoint load_checkpoint(const std::filesystem::path& path, std::uint64_t expected_hash);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace sslmseg
