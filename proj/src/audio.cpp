#include "sslmseg/audio.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "sslmseg/error.hpp"

namespace sslmseg {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

struct WavFormat {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file: " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file: " + path.string());
  }

  WavFormat fmt;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = get_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + 16 > bytes.size()) throw IoError("truncated fmt chunk: " + path.string());
      fmt.tag = get_u16(bytes.data() + body);
      fmt.channels = get_u16(bytes.data() + body + 2);
      fmt.sample_rate = get_u32(bytes.data() + body + 4);
      fmt.bits = get_u16(bytes.data() + body + 14);
      if (fmt.tag == kFormatExtensible) {
        if (size < 40 || body + 26 > bytes.size()) throw FormatError("bad extensible fmt chunk");
        // The sub-format GUID starts with the plain format tag.
        fmt.tag = get_u16(bytes.data() + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = size;
      if (body + data_size > bytes.size()) {
        throw IoError("truncated WAV payload: " + path.string());
      }
      break;
    }
    pos = body + size + (size & 1U);
  }
  if (!have_fmt) throw FormatError("missing fmt chunk: " + path.string());
  if (data == nullptr) throw IoError("missing data chunk: " + path.string());

  const bool pcm16 = fmt.tag == kFormatPcm && fmt.bits == 16;
  const bool f32 = fmt.tag == kFormatFloat && fmt.bits == 32;
  if (!pcm16 && !f32) {
    throw FormatError("unsupported WAV encoding (tag " + std::to_string(fmt.tag) + ", " +
                      std::to_string(fmt.bits) + " bits): " + path.string());
  }
  if (fmt.channels != 1 && fmt.channels != 2) {
    throw FormatError("unsupported channel count " + std::to_string(fmt.channels));
  }
  if (fmt.sample_rate == 0) throw FormatError("zero sample rate: " + path.string());

  const std::size_t sample_bytes = fmt.bits / 8;
  const std::size_t frame_bytes = sample_bytes * fmt.channels;
  if (data_size % frame_bytes != 0) throw IoError("truncated WAV payload: " + path.string());
  const std::size_t n_frames = data_size / frame_bytes;

  AudioBuffer audio;
  audio.sample_rate = static_cast<int>(fmt.sample_rate);
  audio.samples.resize(n_frames);
  auto decode = [&](const unsigned char* p) -> float {
    if (pcm16) return static_cast<float>(static_cast<std::int16_t>(get_u16(p))) / 32768.0f;
    return std::bit_cast<float>(get_u32(p));
  };
  for (std::size_t i = 0; i < n_frames; ++i) {
    const unsigned char* frame = data + i * frame_bytes;
    if (fmt.channels == 1) {
      audio.samples[i] = decode(frame);
    } else {
      audio.samples[i] = 0.5f * (decode(frame) + decode(frame + sample_bytes));
    }
  }
  return audio;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio, WavEncoding encoding) {
  if (audio.sample_rate <= 0) throw DomainError("sample rate must be positive");
  const bool pcm16 = encoding == WavEncoding::pcm16;
  const std::uint16_t bits = pcm16 ? 16 : 32;
  const std::uint32_t data_size = static_cast<std::uint32_t>(audio.samples.size() * (bits / 8));

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  put_u32(out, 36 + data_size);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, pcm16 ? kFormatPcm : kFormatFloat);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate) * (bits / 8));
  put_u16(out, bits / 8);
  put_u16(out, bits);
  out += "data";
  put_u32(out, data_size);
  for (float s : audio.samples) {
    if (pcm16) {
      const long q = std::lround(std::clamp(s, -1.0f, 1.0f) * 32767.0f);
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else {
      put_u32(out, std::bit_cast<std::uint32_t>(s));
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write WAV file: " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("short write: " + path.string());
}

AudioBuffer resample(const AudioBuffer& audio, int target_rate) {
  if (target_rate <= 0) throw DomainError("target rate must be positive");
  if (audio.sample_rate <= 0) throw DomainError("source sample rate must be positive");
  if (target_rate == audio.sample_rate || audio.samples.empty()) {
    AudioBuffer out = audio;
    out.sample_rate = target_rate;
    return out;
  }
  const auto src_rate = static_cast<std::uint64_t>(audio.sample_rate);
  const auto dst_rate = static_cast<std::uint64_t>(target_rate);
  const std::uint64_t n_in = audio.samples.size();
  const std::uint64_t n_out = (n_in * dst_rate + src_rate / 2) / src_rate;

  AudioBuffer out;
  out.sample_rate = target_rate;
  out.samples.resize(n_out);
  const std::size_t last = n_in - 1;
  for (std::uint64_t j = 0; j < n_out; ++j) {
    // Exact rational position j * src / dst, split into integer and fractional parts.
    const std::uint64_t num = j * src_rate;
    const std::size_t i0 = static_cast<std::size_t>(num / dst_rate);
    if (i0 >= last) {
      out.samples[j] = audio.samples[last];
      continue;
    }
    const double frac = static_cast<double>(num % dst_rate) / static_cast<double>(dst_rate);
    const float a = audio.samples[i0];
    const float b = audio.samples[i0 + 1];
    out.samples[j] = static_cast<float>(a + frac * (static_cast<double>(b) - a));
  }
  return out;
}

}  // namespace sslmseg
