#include "sslmseg/synth.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

#include "sslmseg/error.hpp"
#include "sslmseg/random.hpp"

namespace sslmseg {

namespace {

constexpr int kNoisePartials = 64;

/// Sum of unit phasors advanced by complex rotation, renormalised every block.
void add_partial(std::vector<double>& out, double freq_hz, double phase, double amplitude,
                 int sample_rate) {
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
  const std::complex<double> step(std::cos(w), std::sin(w));
  std::complex<double> z(std::cos(phase), std::sin(phase));
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] += amplitude * z.imag();
    z *= step;
    if ((n & 1023U) == 1023U) z /= std::abs(z);
  }
}

}  // namespace

const std::vector<Recipe>& synth_recipes() {
  static const std::vector<Recipe> recipes = {
      {0, RecipeFamily::noise_band, 1500.0, 3000.0, 0},
      {1, RecipeFamily::harmonic_stack, 110.0, 0.0, 8},     // A2
      {2, RecipeFamily::noise_band, 3000.0, 6000.0, 0},
      {3, RecipeFamily::harmonic_stack, 196.0, 0.0, 6},     // G3
      {4, RecipeFamily::noise_band, 6000.0, 11000.0, 0},
      {5, RecipeFamily::harmonic_stack, 261.63, 0.0, 5},    // C4
      {6, RecipeFamily::noise_band, 2000.0, 8000.0, 0},
      {7, RecipeFamily::harmonic_stack, 146.83, 0.0, 8},    // D3
  };
  return recipes;
}

std::vector<float> render_recipe(const Recipe& recipe, std::size_t n_samples, int sample_rate,
                                 std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> acc(n_samples, 0.0);
  if (recipe.family == RecipeFamily::noise_band) {
    for (int k = 0; k < kNoisePartials; ++k) {
      const double f = rng.uniform(recipe.low_hz, recipe.high_hz);
      add_partial(acc, f, rng.uniform(0.0, 2.0 * std::numbers::pi), 1.0, sample_rate);
    }
  } else {
    for (int h = 1; h <= recipe.harmonics; ++h) {
      add_partial(acc, recipe.low_hz * h, rng.uniform(0.0, 2.0 * std::numbers::pi), 1.0 / h,
                  sample_rate);
    }
  }

  double energy = 0.0;
  for (double v : acc) energy += v * v;
  const double rms = n_samples > 0 ? std::sqrt(energy / static_cast<double>(n_samples)) : 0.0;
  const double gain = rms > 0.0 ? rng.uniform(0.08, 0.2) / rms : 0.0;
  // Slow tremolo keeps the texture from being perfectly stationary.
  const double trem_hz = rng.uniform(2.0, 5.0);
  const double trem_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

  std::vector<float> out(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double t = static_cast<double>(n) / sample_rate;
    const double env = 1.0 - 0.25 * (0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * trem_hz * t + trem_phase));
    out[n] = static_cast<float>(gain * env * acc[n]);
  }
  return out;
}

std::vector<SyntheticTrack> synth_corpus(const SynthOptions& options) {
  if (options.n_tracks < 1) throw DomainError("n_tracks must be >= 1");
  if (options.min_segments < 1 || options.max_segments < options.min_segments) {
    throw DomainError("invalid segment count range");
  }
  if (options.min_segment_seconds <= 0.0 ||
      options.max_segment_seconds < options.min_segment_seconds) {
    throw DomainError("invalid segment duration range");
  }
  if (options.sample_rate <= 0) throw DomainError("sample rate must be positive");

  const auto& recipes = synth_recipes();
  std::vector<int> noise_ids;
  std::vector<int> stack_ids;
  for (const auto& r : recipes) {
    (r.family == RecipeFamily::noise_band ? noise_ids : stack_ids).push_back(r.id);
  }

  std::vector<SyntheticTrack> tracks;
  tracks.reserve(static_cast<std::size_t>(options.n_tracks));
  for (int t = 0; t < options.n_tracks; ++t) {
    const std::uint64_t track_seed = mix_seed(options.seed ^ mix_seed(static_cast<std::uint64_t>(t) + 1));
    Rng rng(track_seed);
    SyntheticTrack track;
    char name[32];
    std::snprintf(name, sizeof(name), "synth%04d", t);
    track.id = name;
    track.audio.sample_rate = options.sample_rate;

    const auto n_segments =
        static_cast<int>(rng.uniform_int(options.min_segments, options.max_segments));
    bool noise_family = rng.uniform() < 0.5;
    std::size_t total = 0;
    for (int s = 0; s < n_segments; ++s) {
      const auto& pool = noise_family ? noise_ids : stack_ids;
      const int recipe_id = pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(pool.size()) - 1))];
      const double seconds = rng.uniform(options.min_segment_seconds, options.max_segment_seconds);
      const auto n = static_cast<std::size_t>(std::llround(seconds * options.sample_rate));
      const auto audio = render_recipe(recipes[static_cast<std::size_t>(recipe_id)], n,
                                       options.sample_rate, rng.next());
      track.audio.samples.insert(track.audio.samples.end(), audio.begin(), audio.end());
      track.segments.push_back({static_cast<double>(n) / options.sample_rate, recipe_id});
      total += n;
      if (s + 1 < n_segments) {
        track.boundaries.times.push_back(static_cast<double>(total) / options.sample_rate);
      }
      noise_family = !noise_family;
    }
    tracks.push_back(std::move(track));
  }
  return tracks;
}

}  // namespace sslmseg
