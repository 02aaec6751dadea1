#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "sslmseg/audio.hpp"

namespace sslmseg::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("sslmseg_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline AudioBuffer tone(double hz, double seconds, int sr = 44100, double amp = 0.5) {
  AudioBuffer a{std::vector<float>(static_cast<std::size_t>(seconds * sr)), sr};
  for (std::size_t n = 0; n < a.samples.size(); ++n) {
    a.samples[n] = static_cast<float>(amp * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(n) / sr));
  }
  return a;
}

}  // namespace sslmseg::test
