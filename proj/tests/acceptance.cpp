// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed here.
//
//   acceptance            run everything
//   acceptance --log DIR  also write the per-criterion logs

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "checks.hpp"
#include "oracles.hpp"
#include "sslmseg/annotations.hpp"
#include "sslmseg/byte_io.hpp"
#include "sslmseg/dsp.hpp"
#include "sslmseg/evaluation.hpp"
#include "sslmseg/layers.hpp"
#include "sslmseg/model.hpp"
#include "sslmseg/pipeline.hpp"
#include "sslmseg/postprocess.hpp"
#include "sslmseg/random.hpp"
#include "sslmseg/sslm.hpp"
#include "sslmseg/synth.hpp"
#include "sslmseg/train.hpp"

using namespace sslmseg;

namespace {

// Criterion 1
constexpr int kSslmClips = 10;
constexpr double kSslmClipSeconds = 5.0;
constexpr double kSslmTolerance = 1e-6;
constexpr double kSslmBudgetSeconds = 120.0;
// Criterion 2
constexpr int kGradCases = 20;
constexpr double kGradBudgetSeconds = 60.0;
// Criterion 4
constexpr double kClosedFormTolerance = 1e-12;
constexpr int kMatchTrials = 500;
// Criterion 5
constexpr int kOverfitTracks = 5;
constexpr int kOverfitMaxEpochs = 500;
constexpr double kOverfitTrainF1 = 0.95;
constexpr double kOverfitHeldOutF1 = 0.5;
constexpr double kOverfitTolerance = 0.5;
constexpr double kOverfitBudgetSeconds = 900.0;

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string log;  // deterministic content only (no timings)
  double seconds = 0.0;
};

/// Facts gathered for the numerical-hygiene criterion.
struct Hygiene {
  bool all_finite = true;
  bool sslm_open_interval = true;
  bool targets_unit = true;
  std::vector<std::string> problems;

  void fail(bool& flag, const std::string& what) {
    flag = false;
    problems.push_back(what);
  }
};

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

template <typename Fn>
Outcome timed(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o = fn();
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return o;
}

// ---------------------------------------------------------------------------

Outcome sslm_equivalence(Hygiene& h) {
  Outcome o;
  double worst = 0.0;
  int cases = 0;
  for (int clip = 0; clip < kSslmClips; ++clip) {
    const auto audio = oracle::random_clip(mix_seed(kSeed + static_cast<std::uint64_t>(clip)), kSslmClipSeconds);
    for (const auto& c : oracle::all_sslm_cases()) {
      const auto cmp = oracle::compare_sslm(audio, c);
      ++cases;
      worst = std::max(worst, cmp.max_abs);
      o.log += "clip" + std::to_string(clip) + " " + oracle::case_name(c) + " " +
               std::to_string(cmp.rows) + "x" + std::to_string(cmp.cols) + " max_abs=" +
               fmt("%.9e", cmp.max_abs) + "\n";
      if (!cmp.same_shape || !(cmp.max_abs < kSslmTolerance)) o.pass = false;
      if (!cmp.finite) h.fail(h.all_finite, "non-finite SSLM entry (" + oracle::case_name(c) + ")");
      if (!(cmp.min_value > 0.0 && cmp.max_value < 1.0)) {
        h.fail(h.sslm_open_interval, "SSLM entry outside (0,1) (" + oracle::case_name(c) + ")");
      }
    }
  }
  o.detail = std::to_string(cases) + " cases, max abs error " + fmt("%.3e", worst) + " (< " +
             fmt("%.0e", kSslmTolerance) + ")";
  return o;
}

Outcome gradient_checks(Hygiene& h) {
  Outcome o;
  double worst = 0.0;
  int cases = 0;
  for (const auto& layer : oracle::gradient_layers()) {
    double layer_worst = 0.0;
    for (int k = 0; k < kGradCases; ++k) {
      const auto g = oracle::check_gradient(layer, kSeed, k);
      ++cases;
      layer_worst = std::max(layer_worst, g.rel_error);
      o.log += layer + " case" + std::to_string(k) + " rel=" + fmt("%.9e", g.rel_error) +
               " resamples=" + std::to_string(g.resamples) + "\n";
      if (!(g.rel_error < oracle::kGradTolerance)) o.pass = false;
      if (!g.finite) h.fail(h.all_finite, "non-finite gradient (" + layer + ")");
    }
    worst = std::max(worst, layer_worst);
  }
  o.detail = std::to_string(cases) + " cases over " + std::to_string(oracle::gradient_layers().size()) +
             " layers, max relative error " + fmt("%.3e", worst);
  return o;
}

Outcome shape_contract() {
  Outcome o;
  const ModelSpec spec(80);
  // conv2 padding (3-1)/2 x (5-1)*3/2 with dilation 1x3.
  if (spec.conv2.pad_h != (3 - 1) / 2 || spec.conv2.pad_w != (5 - 1) * 3 / 2 || spec.conv2.dilation_w != 3) {
    o.pass = false;
    o.log += "conv2 padding mismatch\n";
  }
  int checked = 0;
  for (int h : {80, 180, 480}) {
    const Model<float> model(h);
    for (int w : {7, 50, 100, 1000}) {
      const Tensor4<float> x(1, h, w, 0.5f);
      const auto y = model.forward(x);
      const bool ok = y.c == 1 && y.h == 1 && y.w == w;
      o.log += "H=" + std::to_string(h) + " W=" + std::to_string(w) + " -> " + y.shape_string() + "\n";
      if (!ok) o.pass = false;
      ++checked;
    }
  }
  o.detail = std::to_string(checked) + " height/width pairs, output length equals input width";
  return o;
}

Outcome metric_suite() {
  Outcome o;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) {
      o.pass = false;
      o.log += "FAILED: " + what + "\n";
    }
  };
  auto bs = [](std::vector<double> t) { return BoundarySet::from_unsorted(std::move(t)); };

  const auto same = match_boundaries(bs({1.0, 5.0, 9.0}), bs({1.0, 5.0, 9.0}), 0.5);
  expect(same.tp == 3 && same.fp == 0 && same.fn == 0, "identical sets");
  const auto mixed = match_boundaries(bs({1.0, 5.0}), bs({1.2, 7.0}), 0.5);
  expect(mixed.tp == 1 && mixed.fp == 1 && mixed.fn == 1, "ref {1,5} est {1.2,7}");
  const auto cross = match_boundaries(bs({1.0, 1.4}), bs({1.2, 1.9}), 0.5);
  expect(cross.tp == 2 && cross.fp == 0 && cross.fn == 0, "ref {1,1.4} est {1.2,1.9} maximum matching");
  // Nearest-first takes 1.4-1.3 and strands the other two.
  expect(match_boundaries(bs({1.0, 1.4}), bs({1.3, 1.9}), 0.5).tp == 2, "ref {1,1.4} est {1.3,1.9}");
  expect(oracle::greedy_matches(bs({1.0, 1.4}), bs({1.3, 1.9}), 0.5) == 1, "greedy pass finds 1");

  Rng match_rng(mix_seed(kSeed));
  int disagreements = 0;
  for (int trial = 0; trial < kMatchTrials; ++trial) {
    std::vector<double> r, e;
    const auto nr = match_rng.uniform_int(0, 6), ne = match_rng.uniform_int(0, 6);
    for (long long k = 0; k < nr; ++k) r.push_back(match_rng.uniform(0.0, 6.0));
    for (long long k = 0; k < ne; ++k) e.push_back(match_rng.uniform(0.0, 6.0));
    const auto ref = bs(r), est = bs(e);
    if (match_boundaries(ref, est, 0.5).tp != oracle::exhaustive_matches(ref, est, 0.5)) ++disagreements;
  }
  expect(disagreements == 0, "random sets agree with exhaustive matching");
  o.log += "exhaustive trials=" + std::to_string(kMatchTrials) + " disagreements=" + std::to_string(disagreements) + "\n";

  auto close = [&](double a, double b, const std::string& what) {
    expect(std::abs(a - b) <= kClosedFormTolerance, what + " (" + fmt("%.15g", a) + ")");
  };
  const auto half = prf(1, 1, 1, 1.0);
  close(half.precision, 0.5, "P tp=fp=fn=1");
  close(half.recall, 0.5, "R tp=fp=fn=1");
  close(half.f, 0.5, "F1 tp=fp=fn=1");
  const auto zero = prf(0, 3, 2, 1.0);
  close(zero.precision + zero.recall + zero.f, 0.0, "tp=0");
  close(f_beta(0.501, 0.359, 1.0), 0.4182767441860465, "F1(0.501, 0.359)");
  close(f_beta(0.8, 0.5, 0.58), 0.6950280840441023, "F0.58(0.8, 0.5)");
  for (double x : {0.1, 0.37, 0.9}) {
    close(f_beta(x, x, 0.58), x, "F0.58 at P=R");
    close(f_beta(x, x, 1.0), x, "F1 at P=R");
  }

  // Recall is non-increasing over the threshold grid.
  Rng rng(kSeed);
  std::vector<CurveWithReference> data;
  const double fr = PipelineParams{}.final_frame_rate();
  for (int t = 0; t < 6; ++t) {
    CurveWithReference d;
    d.curve.frame_rate = fr;
    d.curve.pad_frames = 50;
    for (int f = 0; f < 400; ++f) d.curve.probs.push_back(rng.uniform());
    std::vector<double> refs;
    for (int k = 0; k < 4; ++k) refs.push_back(rng.uniform(0.0, 40.0));
    d.reference = bs(refs);
    data.push_back(std::move(d));
  }
  const auto sweep = sweep_threshold(data, 0.5, 1.0);
  expect(sweep.table.size() == 201, "201 sweep rows");
  int violations = 0;
  for (std::size_t k = 1; k < sweep.table.size(); ++k) {
    if (sweep.table[k].recall > sweep.table[k - 1].recall) ++violations;
  }
  expect(violations == 0, "recall non-increasing");
  o.log += "sweep rows=" + std::to_string(sweep.table.size()) + " recall violations=" +
           std::to_string(violations) + "\n";
  o.detail = "matching examples, " + std::to_string(kMatchTrials) + " exhaustive-matching trials, closed-form F checks, " +
             std::to_string(sweep.table.size()) +
             "-point recall monotonicity";
  return o;
}

Outcome synthetic_overfit(Hygiene& h) {
  Outcome o;
  RunConfig config;  // MLS only, 6pool
  SynthOptions so;
  so.seed = kSeed;
  so.n_tracks = kOverfitTracks + 1;
  so.min_segments = 3;
  so.max_segments = 4;
  so.min_segment_seconds = 7.0;
  so.max_segment_seconds = 10.0;
  const auto tracks = synth_corpus(so);

  std::vector<TrainExample> train_set, held_out;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const auto& t = tracks[i];
    const auto inputs = network_inputs(t.audio, config, t.id);
    for (const auto& m : inputs) {
      if (!m.all_finite()) h.fail(h.all_finite, "non-finite network input " + t.id);
    }
    auto ex = make_example(t.id, inputs, t.boundaries, config.params);
    for (float v : ex.target) {
      if (!(v >= 0.0f && v <= 1.0f)) h.fail(h.targets_unit, "target outside [0,1] " + t.id);
    }
    o.log += t.id + " " + fmt("%.3f", t.audio.duration_seconds()) + "s boundaries=" +
             std::to_string(t.boundaries.size()) + " frames=" + std::to_string(ex.input.w) + "\n";
    (i < static_cast<std::size_t>(kOverfitTracks) ? train_set : held_out).push_back(std::move(ex));
  }

  TrainOptions opt;
  opt.epochs = kOverfitMaxEpochs;
  opt.seed = kSeed;
  opt.threshold = config.threshold;
  opt.tolerance = kOverfitTolerance;
  opt.stop_at_train_f1 = 1.0;
  TrainResult result;
  try {
    result = train(Model<float>::initialized(train_set.front().input.h, kSeed), train_set, {}, opt);
  } catch (const std::exception& e) {
    h.fail(h.all_finite, std::string("training aborted: ") + e.what());
    o.pass = false;
    o.detail = e.what();
    return o;
  }
  o.log += training_log_csv(result.log);
  for (const auto& p : result.final_model.params()) {
    for (float v : p) {
      if (!std::isfinite(v)) {
        h.fail(h.all_finite, "non-finite weight after training");
        break;
      }
    }
  }

  const auto train_eval = evaluate_set(result.final_model, train_set, opt.threshold, kOverfitTolerance);
  std::vector<CurveWithReference> data;
  for (std::size_t i = 0; i < train_set.size(); ++i) data.push_back({train_eval.curves[i], train_set[i].reference});
  const auto sweep = sweep_threshold(data, kOverfitTolerance, 1.0);
  const auto held = evaluate_set(result.final_model, held_out, sweep.best_threshold, kOverfitTolerance);

  const double first_loss = result.log.front().loss;
  const double last_loss = result.log.back().loss;
  o.log += "threshold=" + fmt("%.3f", sweep.best_threshold) + " train_f1=" + fmt("%.6f", sweep.best_f) +
           " held_out_f1=" + fmt("%.6f", held.score.f) + "\n";
  o.pass = sweep.best_f >= kOverfitTrainF1 && held.score.f >= kOverfitHeldOutF1 && last_loss < first_loss;
  o.detail = std::to_string(result.epochs_run) + " epochs, threshold " + fmt("%.3f", sweep.best_threshold) +
             ", train mean F1 " + fmt("%.3f", sweep.best_f) + " (>= " + fmt("%.2f", kOverfitTrainF1) +
             "), held-out F1 " + fmt("%.3f", held.score.f) + " (>= " + fmt("%.2f", kOverfitHeldOutF1) +
             "), loss " + fmt("%.4f", first_loss) + " -> " + fmt("%.4f", last_loss);
  return o;
}

Outcome constants_audit() {
  Outcome o;
  auto expect = [&](bool cond, const std::string& what) {
    o.log += std::string(cond ? "ok " : "MISMATCH ") + what + "\n";
    if (!cond) o.pass = false;
  };
  const PipelineParams p;
  expect(p.sample_rate == 44100, "sample rate 44100");
  expect(p.window_samples == 2048, "window 2048 samples");
  expect(p.overlap == 0.5 && p.hop_samples() == 1024, "overlap 50% (hop 1024)");
  expect(p.lag_seconds == 14.0 && p.lag_frames() == 603, "L = 14 s (603 frames)");
  expect(p.pool == 6 && p.pool1 == 2 && p.pool2 == 3, "p = 6, p1 = 2, p2 = 3");
  expect(p.stack == 2, "m = 2");
  expect(p.quantile == 0.1, "kappa = 0.1");
  expect(p.final_pad == 50, "gamma = 50");
  expect(p.n_mels == 80 && p.floor_db == -70.0, "80 mel bands, -70 dB floor");
  expect(kDefaultThresholdMls == 0.205 && RunConfig{}.threshold == 0.205, "MLS threshold 0.205");
  expect(AdamHyper{}.lr == 0.001 && RunConfig{}.learning_rate == 0.001, "learning rate 0.001");

  const ModelSpec m(80);
  expect(m.conv1 == Conv2dSpec{1, 32, 5, 7, 1, 1, 2, 3, 1, 1}, "conv1 32 maps 5x7 stride 1x1 pad 2x3");
  expect(m.pool == Pool2dSpec{5, 3, 5, 1, 1, 1}, "max-pool 5x3 stride 5x1 pad 1x1");
  expect(m.conv2 == Conv2dSpec{32, 64, 3, 5, 1, 1, 1, 6, 1, 3}, "conv2 64 maps 3x5 pad 1x6 dilation 1x3");
  expect(m.conv3.out_channels == 128 && m.conv3.kernel_h == 1 && m.conv3.kernel_w == 1 &&
             m.conv3.in_channels == 64 * 16,
         "conv3 128 maps 1x1 over 64x16 collapsed channels");
  expect(m.conv4 == Conv2dSpec{128, 1, 1, 1}, "conv4 1 map 1x1");
  expect(m.pooled_height() == 16, "pooled height 16 for 80 rows");
  o.detail = "analysis parameters, CNN shapes and default threshold";
  return o;
}

Outcome hygiene(Hygiene& h) {
  Outcome o;
  // Silence: the MLS sits exactly on the floor and the SSLM stays inside (0,1).
  const PipelineParams p;
  const AudioBuffer silence{std::vector<float>(static_cast<std::size_t>(p.sample_rate) * 5, 0.0f), p.sample_rate};
  const auto mls = mel_log_spectrogram(silence, p);
  const bool floor_exact = std::all_of(mls.values.begin(), mls.values.end(), [](float v) { return v == -70.0f; });
  if (!floor_exact) h.problems.push_back("MLS of silence is not exactly -70 dB");
  for (FeatureType f : {FeatureType::mfcc_like, FeatureType::chroma}) {
    SslmConfig c;
    c.feature = f;
    const auto r = compute_sslm(silence, c);
    for (float v : r.values) {
      if (!(v > 0.0f && v < 1.0f)) {
        h.fail(h.sslm_open_interval, "silent-clip SSLM entry outside (0,1)");
        break;
      }
    }
  }
  o.pass = floor_exact && h.all_finite && h.sslm_open_interval && h.targets_unit;
  o.detail = std::string("finite ") + (h.all_finite ? "yes" : "no") + ", SSLM in (0,1) " +
             (h.sslm_open_interval ? "yes" : "no") + ", targets in [0,1] " + (h.targets_unit ? "yes" : "no") +
             ", silence MLS == -70 dB " + (floor_exact ? "yes" : "no");
  for (const auto& s : h.problems) o.log += s + "\n";
  return o;
}

void report(int n, const std::string& name, const Outcome& o) {
  std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", n, name.c_str(),
              o.detail.c_str(), o.seconds);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::path log_dir;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--log") == 0 && i + 1 < argc) log_dir = argv[++i];
  }
  auto save = [&](const std::string& name, const std::string& text) {
    if (log_dir.empty()) return;
    std::filesystem::create_directories(log_dir);
    byte_io::write_file(log_dir / name, text);
  };

  Hygiene h;
  bool all = true;

  auto c1 = timed([&] { return sslm_equivalence(h); });
  c1.pass = c1.pass && c1.seconds < kSslmBudgetSeconds;
  report(1, "SSLM oracle equivalence", c1);
  save("criterion1.log", c1.log);

  auto c2 = timed([&] { return gradient_checks(h); });
  c2.pass = c2.pass && c2.seconds < kGradBudgetSeconds;
  report(2, "gradient checks", c2);
  save("criterion2.log", c2.log);

  const auto c3 = timed(shape_contract);
  report(3, "shape contract", c3);

  const auto c4 = timed(metric_suite);
  report(4, "metric suite", c4);
  save("criterion4.log", c4.log);

  auto c5 = timed([&] { return synthetic_overfit(h); });
  c5.pass = c5.pass && c5.seconds < kOverfitBudgetSeconds;
  report(5, "synthetic overfit", c5);
  save("criterion5.log", c5.log);

  const auto c6 = timed(constants_audit);
  report(6, "constants audit", c6);

  const auto c7 = timed([&] { return hygiene(h); });
  report(7, "numerical hygiene", c7);

  auto c8 = timed([&] {
    Hygiene scratch;
    Outcome o;
    const auto r1 = sslm_equivalence(scratch);
    const auto r2 = gradient_checks(scratch);
    const auto r5 = synthetic_overfit(scratch);
    save("criterion8_rerun2.log", r2.log);
    save("criterion8_rerun5.log", r5.log);
    const bool s1 = r1.log == c1.log, s2 = r2.log == c2.log, s5 = r5.log == c5.log;
    o.pass = s1 && s2 && s5;
    o.detail = std::string("rerun logs identical: criterion 1 ") + (s1 ? "yes" : "no") + ", criterion 2 " +
               (s2 ? "yes" : "no") + ", criterion 5 " + (s5 ? "yes" : "no");
    return o;
  });
  report(8, "determinism", c8);

  for (const Outcome* o : std::initializer_list<const Outcome*>{&c1, &c2, &c3, &c4, &c5, &c6, &c7, &c8}) {
    all = all && o->pass;
  }
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
