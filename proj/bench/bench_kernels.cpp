// Serial reference vs OpenMP kernels on track-sized inputs (about 3 minutes
// of audio). Run with OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <vector>

#include "sslmseg/dsp.hpp"
#include "sslmseg/kernels.hpp"
#include "sslmseg/random.hpp"

using namespace sslmseg;

namespace {

constexpr std::size_t kSamples = 44100 * 180;
constexpr std::size_t kBins = 1025;
constexpr std::size_t kLagBins = 100;

const std::vector<float>& samples() {
  static const auto s = [] {
    Rng rng(1);
    std::vector<float> v(kSamples);
    for (auto& x : v) x = static_cast<float>(rng.uniform(-0.5, 0.5));
    return v;
  }();
  return s;
}

std::size_t stft_frames() { return (kSamples - 2048) / 1024 + 1; }

// DCT-like stacked series at the pooled rate, padded by the lag horizon.
const std::vector<double>& series(std::size_t dims, std::size_t frames) {
  static std::vector<double> v;
  if (v.size() != dims * frames) {
    Rng rng(2);
    v.resize(dims * frames);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  }
  return v;
}

template <void (*Kernel)(const kernels::StftArgs&)>
void BM_stft(benchmark::State& state) {
  const auto window = hann_window(2048);
  std::vector<float> out(kBins * stft_frames());
  for (auto _ : state) {
    Kernel({samples(), window, 1024, stft_frames(), out});
    benchmark::DoNotOptimize(out.data());
  }
}

template <void (*Kernel)(const kernels::MelArgs&)>
void BM_mel(benchmark::State& state) {
  const auto fb = mel_filterbank(PipelineParams{});
  std::vector<float> stft(kBins * stft_frames(), 0.25f);
  std::vector<float> out(fb.n_mels * stft_frames());
  for (auto _ : state) {
    Kernel({fb.weights, fb.n_mels, stft, kBins, stft_frames(), -70.0, out});
    benchmark::DoNotOptimize(out.data());
  }
}

template <void (*Kernel)(const kernels::LagArgs&)>
void BM_lag(benchmark::State& state) {
  const std::size_t frames = stft_frames() / 6 + kLagBins;
  const auto& data = series(158, frames);
  std::vector<double> out(frames * kLagBins);
  for (auto _ : state) {
    Kernel({{data, 158, frames}, kLagBins, Metric::cosine, out});
    benchmark::DoNotOptimize(out.data());
  }
}

template <void (*Kernel)(const kernels::EqualizeArgs&)>
void BM_equalize(benchmark::State& state) {
  const std::size_t frames = stft_frames() / 6 + kLagBins;
  const auto& data = series(158, frames);
  std::vector<double> d(frames * kLagBins), eps(d.size());
  kernels::serial::lag_distances({{data, 158, frames}, kLagBins, Metric::euclidean, d});
  for (auto _ : state) {
    Kernel({d, frames, kLagBins, 0.1, kLagBins, eps});
    benchmark::DoNotOptimize(eps.data());
  }
}

}  // namespace

BENCHMARK(BM_stft<kernels::serial::stft_magnitude>)->Name("stft/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_stft<kernels::omp::stft_magnitude>)->Name("stft/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mel<kernels::serial::mel_db>)->Name("mel/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mel<kernels::omp::mel_db>)->Name("mel/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_lag<kernels::serial::lag_distances>)->Name("lag_distances/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_lag<kernels::omp::lag_distances>)->Name("lag_distances/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_equalize<kernels::serial::equalize>)->Name("equalize/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_equalize<kernels::omp::equalize>)->Name("equalize/omp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
