#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "sslmseg/dsp.hpp"
#include "sslmseg/error.hpp"
#include "sslmseg/matrix_io.hpp"

using namespace sslmseg;

TEST_SUITE("dsp") {
  TEST_CASE("periodic Hann") {
    const auto w = hann_window(2048);
    CHECK(w[0] == 0.0);
    CHECK(w[1024] == doctest::Approx(1.0));
    double sum = 0.0;
    for (double v : w) sum += v;
    CHECK(sum == doctest::Approx(1024.0).epsilon(1e-12));
  }

  TEST_CASE("frame count and short input") {
    const PipelineParams p;
    const auto s = stft_magnitude(AudioBuffer{std::vector<float>(44100, 0.0f), 44100}, p);
    CHECK(s.cols == 42);
    CHECK(s.rows == 1025);
    CHECK(std::all_of(s.values.begin(), s.values.end(), [](float v) { return v == 0.0f; }));
    CHECK_THROWS_AS(stft_magnitude(AudioBuffer{std::vector<float>(2047, 0.0f), 44100}, p), InputTooShortError);
  }

  TEST_CASE("constant signal matches a direct DFT") {
    const PipelineParams p;
    const AudioBuffer ones{std::vector<float>(4096, 1.0f), 44100};
    const auto s = stft_magnitude(ones, p);
    const auto o = oracle::stft(ones.samples, p);
    REQUIRE(o.cols == s.cols);
    for (std::size_t f = 0; f < s.cols; ++f) {
      CHECK(s.at(0, f) == doctest::Approx(1024.0));
      for (std::size_t k = 0; k < s.rows; ++k) CHECK(std::abs(s.at(k, f) - o.at(k, f)) < 1e-3);
    }
  }

  TEST_CASE("mel log spectrogram") {
    const PipelineParams p;
    const auto mls = mel_log_spectrogram(AudioBuffer{std::vector<float>(10000, 0.0f), 44100}, p);
    CHECK(mls.rows == 80);
    CHECK(std::all_of(mls.values.begin(), mls.values.end(), [](float v) { return v == -70.0f; }));

    const auto a = test::tone(1000.0, 0.5);
    const auto s = stft_magnitude(a, p);
    const auto got = mel_log_from_stft(s, p);
    const auto want = oracle::mel_log(oracle::stft(a.samples, p), p);
    double worst = 0.0;
    for (std::size_t i = 0; i < got.values.size(); ++i) worst = std::max(worst, std::abs(got.values[i] - want.values[i]));
    CHECK(worst < 1e-3);
  }

  TEST_CASE("mel scale") {
    CHECK(hz_to_mel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)));
    CHECK(mel_to_hz(hz_to_mel(4321.0)) == doctest::Approx(4321.0));
    const auto fb = mel_filterbank(PipelineParams{});
    CHECK(fb.n_mels == 80);
    CHECK(fb.n_bins == 1025);
    for (std::size_t m = 1; m < fb.n_mels; ++m) CHECK(fb.centers_hz[m] > fb.centers_hz[m - 1]);
  }

  TEST_CASE("chroma") {
    const PipelineParams p;
    CHECK(pitch_class(440.0) == 9);
    CHECK(pitch_class(261.63) == 0);
    const FeatureMatrix zero(1025, 3, FeatureKind::stft_mag, p.base_hop_seconds());
    const auto zc = chroma_project(zero, p);
    CHECK(zc.rows == 12);
    CHECK(std::all_of(zc.values.begin(), zc.values.end(), [](float v) { return v == 0.0f; }));
    for (double hz : {440.0, 880.0}) {
      const auto c = chroma_project(stft_magnitude(test::tone(hz, 0.5), p), p);
      for (std::size_t f = 0; f < c.cols; ++f) {
        std::size_t best = 0;
        for (std::size_t r = 1; r < 12; ++r) {
          if (c.at(r, f) > c.at(best, f)) best = r;
        }
        CHECK(best == 9);
      }
    }
  }

  TEST_CASE("time max-pooling") {
    FeatureMatrix m(1, 6, FeatureKind::mls, 0.1);
    m.values = {1, 5, 3, 2, 9, 4};
    const auto p3 = max_pool_time(m, 3);
    CHECK(p3.values == std::vector<float>{5, 9});
    CHECK(p3.pool_factor == 3);
    CHECK(max_pool_time(m, 1).values == m.values);
    CHECK(max_pool_time(m, 4).values == std::vector<float>{5, 9});
    const FeatureMatrix c(2, 7, FeatureKind::mls, 0.1, 3.0f);
    const auto pc = max_pool_time(c, 3);
    CHECK(pc.cols == 3);
    CHECK(std::all_of(pc.values.begin(), pc.values.end(), [](float v) { return v == 3.0f; }));
  }
}

TEST_SUITE("matrix_io") {
  TEST_CASE("round trips") {
    test::TempDir dir("mat");
    const FeatureMatrix empty;
    save_matrix(empty, dir.path() / "e.mat");
    CHECK(load_matrix(dir.path() / "e.mat") == empty);

    FeatureMatrix m(2, 3, FeatureKind::sslm, 0.139);
    m.values = {1.5f, -0.0f, 3.25e-8f, 7.0f, -2.0f, 1e30f};
    m.pool_factor = 6;
    m.pad_frames = 50;
    save_matrix(m, dir.path() / "m.mat");
    const auto back = load_matrix(dir.path() / "m.mat");
    CHECK(back == m);
    CHECK(std::signbit(back.values[1]));
    CHECK(encode_matrix(m).size() == kMatrixHeaderBytes + 6 * 4);
  }

  TEST_CASE("bad magic and dtype") {
    const FeatureMatrix m(1, 1, FeatureKind::mls, 0.1);
    auto bytes = encode_matrix(m);
    bytes[0] = 'X';
    CHECK_THROWS_AS(decode_matrix(bytes), FormatError);
    bytes = encode_matrix(m);
    bytes[16] = 9;
    CHECK_THROWS_AS(decode_matrix(bytes), FormatError);
  }
}
