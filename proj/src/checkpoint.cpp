#include "sslmseg/checkpoint.hpp"

#include <cstdio>

#include "sslmseg/byte_io.hpp"
#include "sslmseg/error.hpp"

namespace sslmseg {

namespace {

constexpr std::string_view kMagic = "SSLMSEGC";
constexpr std::uint32_t kVersion = 1;

void put_tensor(std::string& out, const std::string& name, const std::vector<float>& v) {
  byte_io::put_u32(out, static_cast<std::uint32_t>(name.size()));
  out += name;
  byte_io::put_u64(out, v.size());
  for (float x : v) byte_io::put_f32(out, x);
}

std::vector<float> get_tensor(byte_io::Reader& r, const std::string& expected_name,
                              std::size_t expected_size) {
  const auto len = r.u32();
  const std::string name(r.raw(len));
  if (name != expected_name) {
    throw FormatError("checkpoint tensor '" + name + "' found where '" + expected_name +
                      "' was expected");
  }
  const auto n = r.u64();
  if (n != expected_size) {
    throw FormatError("checkpoint tensor '" + name + "' has " + std::to_string(n) +
                      " values, expected " + std::to_string(expected_size));
  }
  std::vector<float> v(n);
  for (auto& x : v) x = r.f32();
  return v;
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& c) {
  std::string out(kMagic);
  byte_io::put_u32(out, kVersion);
  byte_io::put_u64(out, c.config_hash);
  byte_io::put_u32(out, c.epoch);
  byte_io::put_u32(out, static_cast<std::uint32_t>(c.model.input_height()));
  byte_io::put_u64(out, c.adam.step);
  byte_io::put_f64(out, c.adam.hyper.lr);
  byte_io::put_f64(out, c.adam.hyper.beta1);
  byte_io::put_f64(out, c.adam.hyper.beta2);
  byte_io::put_f64(out, c.adam.hyper.eps);
  const bool has_moments = !c.adam.m.empty();
  byte_io::put_u32(out, has_moments ? 1U : 0U);

  const auto& names = Model<float>::param_names();
  for (std::size_t p = 0; p < names.size(); ++p) put_tensor(out, names[p], c.model.params()[p]);
  if (has_moments) {
    for (std::size_t p = 0; p < names.size(); ++p) put_tensor(out, "adam.m." + names[p], c.adam.m[p]);
    for (std::size_t p = 0; p < names.size(); ++p) put_tensor(out, "adam.v." + names[p], c.adam.v[p]);
  }
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  byte_io::Reader r(bytes);
  if (bytes.size() < kMagic.size() || r.raw(kMagic.size()) != kMagic) {
    throw FormatError("not a checkpoint file (bad magic)");
  }
  const auto version = r.u32();
  if (version != kVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version));
  Checkpoint c;
  c.config_hash = r.u64();
  c.epoch = r.u32();
  const auto height = static_cast<int>(r.u32());
  c.model = Model<float>(height);
  c.adam.step = r.u64();
  c.adam.hyper.lr = r.f64();
  c.adam.hyper.beta1 = r.f64();
  c.adam.hyper.beta2 = r.f64();
  c.adam.hyper.eps = r.f64();
  const bool has_moments = r.u32() != 0;

  const auto& names = Model<float>::param_names();
  for (std::size_t p = 0; p < names.size(); ++p) {
    c.model.params()[p] = get_tensor(r, names[p], c.model.params()[p].size());
  }
  if (has_moments) {
    c.adam.m.resize(names.size());
    c.adam.v.resize(names.size());
    for (std::size_t p = 0; p < names.size(); ++p) {
      c.adam.m[p] = get_tensor(r, "adam.m." + names[p], c.model.params()[p].size());
    }
    for (std::size_t p = 0; p < names.size(); ++p) {
      c.adam.v[p] = get_tensor(r, "adam.v." + names[p], c.model.params()[p].size());
    }
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after checkpoint payload");
  return c;
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
  byte_io::write_file(path, encode_checkpoint(c));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(byte_io::read_file(path));
}

Checkpoint load_checkpoint(const std::filesystem::path& path, std::uint64_t expected_hash) {
  auto c = load_checkpoint(path);
  if (c.config_hash != expected_hash) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "checkpoint config hash %016llx does not match %016llx",
                  static_cast<unsigned long long>(c.config_hash),
                  static_cast<unsigned long long>(expected_hash));
    throw CompatibilityError(std::string(buf) + " (" + path.string() + ")");
  }
  return c;
}

}  // namespace sslmseg
