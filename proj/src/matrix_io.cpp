#include "sslmseg/matrix_io.hpp"

#include <cmath>
#include <fstream>
#include <iterator>

#include "sslmseg/byte_io.hpp"
#include "sslmseg/error.hpp"

namespace sslmseg {

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::stft_mag: return "stft_mag";
    case FeatureKind::mls: return "mls";
    case FeatureKind::chroma: return "chroma";
    case FeatureKind::lag_features: return "lag_features";
    case FeatureKind::sslm: return "sslm";
    case FeatureKind::net_input: return "net_input";
  }
  return "unknown";
}

bool FeatureMatrix::all_finite() const {
  for (float v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

namespace byte_io {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write: " + path.string());
}

}  // namespace byte_io

std::string encode_matrix(const FeatureMatrix& m) {
  if (m.values.size() != m.rows * m.cols) throw DimensionError("matrix payload size mismatch");
  std::string out;
  out.reserve(kMatrixHeaderBytes + 4 * m.values.size());
  out.append(kMatrixMagic, sizeof(kMatrixMagic));
  byte_io::put_u32(out, static_cast<std::uint32_t>(m.rows));
  byte_io::put_u32(out, static_cast<std::uint32_t>(m.cols));
  byte_io::put_u32(out, kDtypeFloat32);
  byte_io::put_f64(out, m.hop_seconds);
  byte_io::put_u32(out, m.pool_factor);
  byte_io::put_u32(out, m.pad_frames);
  byte_io::put_u32(out, static_cast<std::uint32_t>(m.kind));
  for (float v : m.values) byte_io::put_f32(out, v);
  return out;
}

FeatureMatrix decode_matrix(const std::string& bytes) {
  if (bytes.size() < kMatrixHeaderBytes) throw FormatError("matrix file too short for header");
  byte_io::Reader in(bytes);
  if (in.raw(sizeof(kMatrixMagic)) != std::string_view(kMatrixMagic, sizeof(kMatrixMagic))) {
    throw FormatError("bad matrix magic");
  }
  FeatureMatrix m;
  m.rows = in.u32();
  m.cols = in.u32();
  if (in.u32() != kDtypeFloat32) throw FormatError("unsupported matrix dtype");
  m.hop_seconds = in.f64();
  m.pool_factor = in.u32();
  m.pad_frames = in.u32();
  const std::uint32_t kind = in.u32();
  if (kind > static_cast<std::uint32_t>(FeatureKind::net_input)) {
    throw FormatError("unknown matrix kind " + std::to_string(kind));
  }
  m.kind = static_cast<FeatureKind>(kind);
  const std::size_t n = m.rows * m.cols;
  if (in.remaining() != 4 * n) throw IoError("matrix payload length does not match rows x cols");
  m.values.resize(n);
  for (auto& v : m.values) v = in.f32();
  return m;
}

void save_matrix(const FeatureMatrix& m, const std::filesystem::path& path) {
  byte_io::write_file(path, encode_matrix(m));
}

FeatureMatrix load_matrix(const std::filesystem::path& path) {
  return decode_matrix(byte_io::read_file(path));
}

}  // namespace sslmseg
