#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sslmseg/audio.hpp"
#include "sslmseg/boundary_set.hpp"

namespace sslmseg {

struct SegmentSpec {
  double duration_seconds = 0.0;
  int recipe_id = 0;
};

struct SyntheticTrack {
  std::string id;
  AudioBuffer audio;
  BoundarySet boundaries;
  std::vector<SegmentSpec> segments;
};

struct SynthOptions {
  std::uint64_t seed = 0;
  int n_tracks = 1;
  int min_segments = 3;
  int max_segments = 5;
  double min_segment_seconds = 7.0;
  double max_segment_seconds = 10.0;
  int sample_rate = 44100;
};

enum class RecipeFamily { noise_band, harmonic_stack };

/// Timbre recipe for one segment. Noise bands sit above 1.5 kHz, harmonic
/// stacks have centroids below 800 Hz, so alternating families guarantees a
/// large spectral-centroid jump at every junction.
struct Recipe {
  int id = 0;
  RecipeFamily family = RecipeFamily::noise_band;
  double low_hz = 0.0;   // noise band edge, or fundamental for a stack
  double high_hz = 0.0;  // noise band edge, unused for a stack
  int harmonics = 0;
};

const std::vector<Recipe>& synth_recipes();

std::vector<SyntheticTrack> synth_corpus(const SynthOptions& options);

/// Renders one segment of the given recipe; deterministic in `seed`.
std::vector<float> render_recipe(const Recipe& recipe, std::size_t n_samples, int sample_rate,
                                 std::uint64_t seed);

}  // namespace sslmseg
