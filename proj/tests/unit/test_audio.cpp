#include <cstdint>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "sslmseg/byte_io.hpp"
#include "sslmseg/error.hpp"
#include "sslmseg/synth.hpp"

using namespace sslmseg;

namespace {

// Minimal 16-bit PCM writer, independent of write_wav.
void write_pcm16(const std::filesystem::path& path, const std::vector<std::int16_t>& interleaved, int channels,
                 int sr) {
  std::string b = "RIFF";
  const auto data_bytes = static_cast<std::uint32_t>(interleaved.size() * 2);
  byte_io::put_u32(b, 36 + data_bytes);
  b += "WAVEfmt ";
  byte_io::put_u32(b, 16);
  b.push_back(1), b.push_back(0);
  b.push_back(static_cast<char>(channels)), b.push_back(0);
  byte_io::put_u32(b, static_cast<std::uint32_t>(sr));
  byte_io::put_u32(b, static_cast<std::uint32_t>(sr * channels * 2));
  b.push_back(static_cast<char>(channels * 2)), b.push_back(0);
  b.push_back(16), b.push_back(0);
  b += "data";
  byte_io::put_u32(b, data_bytes);
  for (auto s : interleaved) {
    b.push_back(static_cast<char>(s & 0xFF));
    b.push_back(static_cast<char>((s >> 8) & 0xFF));
  }
  byte_io::write_file(path, b);
}

}  // namespace

TEST_SUITE("audio") {
  TEST_CASE("zero PCM file") {
    test::TempDir dir("wav");
    write_pcm16(dir.path() / "z.wav", std::vector<std::int16_t>(44100, 0), 1, 44100);
    const auto a = read_wav(dir.path() / "z.wav");
    CHECK(a.sample_rate == 44100);
    REQUIRE(a.samples.size() == 44100);
    for (float v : a.samples) CHECK(v == 0.0f);
  }

  TEST_CASE("stereo downmix and 16-bit scaling") {
    test::TempDir dir("wav");
    write_pcm16(dir.path() / "s.wav", {16384, -16384, 16384, -16384}, 2, 8000);
    const auto s = read_wav(dir.path() / "s.wav");
    REQUIRE(s.samples.size() == 2);
    CHECK(s.samples[0] == 0.0f);
    write_pcm16(dir.path() / "m.wav", {16384}, 1, 8000);
    CHECK(read_wav(dir.path() / "m.wav").samples[0] == 0.5f);
  }

  TEST_CASE("float32 and pcm16 round trips") {
    test::TempDir dir("wav");
    const AudioBuffer a{{0.0f, 0.25f, -0.5f, 0.125f}, 22050};
    write_wav(dir.path() / "f.wav", a, WavEncoding::float32);
    CHECK(read_wav(dir.path() / "f.wav").samples == a.samples);
    write_wav(dir.path() / "p.wav", a, WavEncoding::pcm16);
    const auto p = read_wav(dir.path() / "p.wav");
    CHECK(p.sample_rate == 22050);
    CHECK(p.samples == a.samples);
  }

  TEST_CASE("bad files") {
    test::TempDir dir("wav");
    byte_io::write_file(dir.path() / "junk.wav", "this is not audio at all, not even close");
    CHECK_THROWS_AS(read_wav(dir.path() / "junk.wav"), FormatError);
    write_pcm16(dir.path() / "t.wav", std::vector<std::int16_t>(100, 1), 1, 8000);
    auto bytes = byte_io::read_file(dir.path() / "t.wav");
    bytes.resize(bytes.size() - 3);
    byte_io::write_file(dir.path() / "t.wav", bytes);
    CHECK_THROWS_AS(read_wav(dir.path() / "t.wav"), IoError);
    CHECK_THROWS_AS(read_wav(dir.path() / "missing.wav"), IoError);
  }

  TEST_CASE("resample") {
    const AudioBuffer a{{0.1f, -0.3f, 0.7f}, 44100};
    CHECK(resample(a, 44100).samples == a.samples);

    const auto c = resample(AudioBuffer{std::vector<float>(100, 0.25f), 22050}, 44100);
    CHECK(c.sample_rate == 44100);
    for (float v : c.samples) CHECK(v == 0.25f);

    const auto r = resample(AudioBuffer{{0.0f, 1.0f, 2.0f, 3.0f}, 2}, 4);
    CHECK(r.samples == std::vector<float>{0.0f, 0.5f, 1.0f, 1.5f, 2.0f, 2.5f, 3.0f, 3.0f});
  }
}

TEST_SUITE("synth") {
  TEST_CASE("fixed segments give exact boundaries") {
    SynthOptions o;
    o.seed = 7;
    o.n_tracks = 1;
    o.min_segments = o.max_segments = 3;
    o.min_segment_seconds = o.max_segment_seconds = 10.0;
    const auto t = synth_corpus(o);
    REQUIRE(t.size() == 1);
    CHECK(t[0].boundaries.times == std::vector<double>{10.0, 20.0});
    CHECK(t[0].audio.duration_seconds() == doctest::Approx(30.0));
    CHECK(synth_corpus(o)[0].audio.samples == t[0].audio.samples);
  }

  TEST_CASE("adjacent segments differ in spectral centroid") {
    SynthOptions o;
    o.seed = 11;
    o.n_tracks = 2;
    o.min_segment_seconds = o.max_segment_seconds = 2.0;
    for (const auto& t : synth_corpus(o)) {
      std::vector<double> centroids;
      const int sr = t.audio.sample_rate;
      std::size_t start = 0;
      for (const auto& seg : t.segments) {
        // Direct DFT of 2048 Hann-windowed samples from the middle of the segment.
        const std::size_t len = static_cast<std::size_t>(seg.duration_seconds * sr);
        const std::size_t mid = start + len / 2 - 1024;
        double num = 0.0, den = 0.0;
        for (int k = 1; k < 1024; ++k) {
          double re = 0.0, im = 0.0;
          for (int n = 0; n < 2048; ++n) {
            const double ph = 2.0 * std::numbers::pi * k * n / 2048.0;
            const double x = t.audio.samples[mid + n] * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / 2048.0));
            re += x * std::cos(ph);
            im -= x * std::sin(ph);
          }
          const double mag = std::hypot(re, im);
          num += mag * k * sr / 2048.0;
          den += mag;
        }
        centroids.push_back(num / den);
        start += len;
      }
      CAPTURE(t.id);
      for (std::size_t i = 1; i < centroids.size(); ++i) CHECK(std::abs(centroids[i] - centroids[i - 1]) > 500.0);
    }
  }
}
