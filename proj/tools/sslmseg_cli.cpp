// sslmseg: boundary detection pipeline driver.
//
//   sslmseg synth --out corpus --tracks 8
//   sslmseg --config corpus/config.txt features
//   sslmseg --config corpus/config.txt train --manifest corpus/split.tsv
//   sslmseg --config corpus/config.txt sweep-threshold --manifest corpus/split.tsv
//   sslmseg --config corpus/config.txt predict --manifest corpus/split.tsv --split test
//   sslmseg evaluate --ref corpus/annotations --est corpus/run/predictions

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>

#include "sslmseg/annotations.hpp"
#include "sslmseg/audio.hpp"
#include "sslmseg/byte_io.hpp"
#include "sslmseg/checkpoint.hpp"
#include "sslmseg/config.hpp"
#include "sslmseg/error.hpp"
#include "sslmseg/evaluation.hpp"
#include "sslmseg/matrix_io.hpp"
#include "sslmseg/pipeline.hpp"
#include "sslmseg/postprocess.hpp"
#include "sslmseg/svg_plot.hpp"
#include "sslmseg/synth.hpp"
#include "sslmseg/train.hpp"

namespace fs = std::filesystem;
using namespace sslmseg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitUsage = 2;

/// Bad arguments or configuration discovered after parsing.
struct UsageError : Error {
  using Error::Error;
};

std::mutex g_log_mutex;

void log_line(const std::string& s) {
  std::lock_guard lock(g_log_mutex);
  std::cerr << s << '\n';
}

RunConfig resolve_config(const std::string& path) {
  RunConfig c;
  if (!path.empty()) {
    try {
      c = load_config(path);
    } catch (const IoError& e) {
      throw UsageError("cannot read config " + path + ": " + e.what());
    } catch (const Error& e) {
      throw UsageError("invalid config " + path + ": " + e.what());
    }
  }
  apply_env_overrides(c);
  return c;
}

std::vector<std::string> split_ids(const DatasetSplit& s, const std::string& name) {
  if (name == "train") return s.train;
  if (name == "val" || name == "validation") return s.validation;
  if (name == "test") return s.test;
  if (name == "all") {
    std::vector<std::string> all = s.train;
    all.insert(all.end(), s.validation.begin(), s.validation.end());
    all.insert(all.end(), s.test.begin(), s.test.end());
    return all;
  }
  throw UsageError("unknown split '" + name + "' (train, val, test or all)");
}

DatasetSplit load_manifest(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("manifest " + path + " does not exist");
  return parse_manifest(byte_io::read_file(path));
}

fs::path annotation_path(const RunConfig& c, const std::string& id) {
  return c.annotations_dir / (id + ".txt");
}

std::vector<TrainExample> load_examples(const RunConfig& c, const std::vector<std::string>& ids) {
  std::vector<TrainExample> out;
  for (const auto& id : ids) {
    const auto inputs = load_network_inputs(c.features_dir, id, c);
    const auto ann = annotation_path(c, id);
    if (!fs::exists(ann)) throw IoError("track " + id + ": missing annotation " + ann.string());
    out.push_back(make_example(id, inputs, parse_functions_file(ann), c.params));
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out = "corpus";
  int tracks = 8;
  std::uint64_t seed = 0;
  int min_segments = 3;
  int max_segments = 4;
  double min_seconds = 7.0;
  double max_seconds = 10.0;
  std::uint64_t split_seed = 1;
};

int cmd_synth(const SynthArgs& a) {
  SynthOptions opt;
  opt.seed = a.seed;
  opt.n_tracks = a.tracks;
  opt.min_segments = a.min_segments;
  opt.max_segments = a.max_segments;
  opt.min_segment_seconds = a.min_seconds;
  opt.max_segment_seconds = a.max_seconds;

  const fs::path root = fs::absolute(a.out);
  RunConfig c;
  c.audio_dir = root / "audio";
  c.annotations_dir = root / "annotations";
  c.features_dir = root / "features";
  c.run_dir = root / "run";
  c.split_seed = a.split_seed;
  fs::create_directories(c.audio_dir);
  fs::create_directories(c.annotations_dir);

  const auto tracks = synth_corpus(opt);
  std::vector<std::string> ids;
  for (const auto& t : tracks) {
    write_wav(c.audio_dir / (t.id + ".wav"), t.audio);
    byte_io::write_file(annotation_path(c, t.id), serialize_functions(t.boundaries));
    ids.push_back(t.id);
  }
  DatasetSplit split;
  if (ids.size() >= 3) {
    split = split_dataset(ids, a.split_seed);
  } else {
    split.train = ids;
  }
  byte_io::write_file(root / "split.tsv", serialize_manifest(split));
  byte_io::write_file(root / "config.txt", serialize_config(c));
  std::printf("wrote %zu tracks to %s\n", tracks.size(), root.string().c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct FeaturesArgs {
  std::vector<std::string> wavs;
  int jobs = 0;
  bool force = false;
};

std::string stamp_for(const RunConfig& c, const std::string& wav_bytes) {
  return hash_hex(byte_io::fnv1a(wav_bytes, c.feature_hash())) + "\n";
}

int cmd_features(const RunConfig& c, const FeaturesArgs& a) {
  std::vector<fs::path> wavs;
  if (a.wavs.empty()) {
    if (!fs::is_directory(c.audio_dir)) {
      throw UsageError("audio directory " + c.audio_dir.string() + " does not exist");
    }
    for (const auto& e : fs::directory_iterator(c.audio_dir)) {
      if (e.is_regular_file() && e.path().extension() == ".wav") wavs.push_back(e.path());
    }
  } else {
    wavs.assign(a.wavs.begin(), a.wavs.end());
  }
  std::sort(wavs.begin(), wavs.end());
  fs::create_directories(c.features_dir);

  const int jobs = a.jobs > 0 ? a.jobs : omp_get_max_threads();
  std::atomic<int> failed{0}, computed{0}, skipped{0};
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::size_t i = 0; i < wavs.size(); ++i) {
    const auto& wav = wavs[i];
    const std::string id = wav.stem().string();
    try {
      const auto bytes = byte_io::read_file(wav);
      const auto stamp = stamp_for(c, bytes);
      const auto stamp_path = c.features_dir / (id + ".stamp");
      bool fresh = !a.force && fs::exists(stamp_path) && byte_io::read_file(stamp_path) == stamp;
      for (const auto& in : c.inputs()) fresh = fresh && fs::exists(feature_path(c.features_dir, id, in));
      if (fresh) {
        ++skipped;
        continue;
      }
      const auto audio = prepare_audio(read_wav(wav), c.params);
      const auto inputs = network_inputs(audio, c, id);
      const auto specs = c.inputs();
      for (std::size_t k = 0; k < inputs.size(); ++k) {
        save_matrix(inputs[k], feature_path(c.features_dir, id, specs[k]));
      }
      byte_io::write_file(stamp_path, stamp);
      ++computed;
      log_line("features: " + id + " (" + std::to_string(inputs.front().cols) + " frames)");
    } catch (const std::exception& e) {
      ++failed;
      log_line("features: " + wav.string() + ": " + e.what());
    }
  }
  std::printf("features: %d computed, %d up to date, %d failed\n", computed.load(), skipped.load(),
              failed.load());
  return failed.load() > 0 ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string manifest = "split.tsv";
  std::optional<int> epochs;
};

int cmd_train(RunConfig c, const TrainArgs& a) {
  if (a.epochs) c.epochs = *a.epochs;
  const auto split = load_manifest(a.manifest);
  if (split.train.empty()) throw UsageError("manifest has no training tracks");
  const auto train_set = load_examples(c, split.train);
  const auto val_set = load_examples(c, split.validation);

  fs::create_directories(c.run_dir);
  byte_io::write_file(c.run_dir / "config.txt", serialize_config(c));
  const auto log_path = c.run_dir / "train_log.csv";
  std::string log = std::string(kTrainLogHeader) + "\n";
  byte_io::write_file(log_path, log);

  TrainOptions opt;
  opt.epochs = c.epochs;
  opt.seed = c.seed;
  opt.hyper.lr = c.learning_rate;
  opt.threshold = c.threshold;
  opt.tolerance = c.tolerance;
  opt.on_record = [&](const EpochRecord& r) {
    const auto row = format_log_row(r);
    log += row + "\n";
    byte_io::write_file(log_path, log);
    std::printf("%s\n", row.c_str());
    std::fflush(stdout);
  };
  auto model = Model<float>::initialized(train_set.front().input.h, c.seed);
  const auto result = train(std::move(model), train_set, val_set, opt);

  const auto hash = c.feature_hash();
  save_checkpoint({hash, static_cast<std::uint32_t>(result.best_epoch), result.best_model, result.adam},
                  c.run_dir / "checkpoint.bin");
  save_checkpoint({hash, static_cast<std::uint32_t>(result.epochs_run), result.final_model, result.adam},
                  c.run_dir / "last.bin");
  std::printf("best epoch %d; checkpoint %s\n", result.best_epoch,
              (c.run_dir / "checkpoint.bin").string().c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PredictArgs {
  std::string checkpoint;
  std::optional<double> threshold;
  std::string out;
  std::string manifest;
  std::string split = "test";
  std::vector<std::string> tracks;
};

Checkpoint open_checkpoint(const RunConfig& c, const std::string& path) {
  const fs::path p = path.empty() ? c.run_dir / "checkpoint.bin" : fs::path(path);
  if (!fs::exists(p)) throw UsageError("checkpoint " + p.string() + " does not exist");
  return load_checkpoint(p, c.feature_hash());
}

int cmd_predict(const RunConfig& c, const PredictArgs& a) {
  const auto ck = open_checkpoint(c, a.checkpoint);
  std::vector<std::string> ids = a.tracks;
  if (ids.empty()) {
    if (a.manifest.empty()) throw UsageError("give track ids or --manifest");
    ids = split_ids(load_manifest(a.manifest), a.split);
  }
  const double threshold = a.threshold.value_or(c.threshold);
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw UsageError("threshold must be in [0, 1]");
  const fs::path out = a.out.empty() ? c.run_dir / "predictions" : fs::path(a.out);
  fs::create_directories(out);

  int failed = 0;
  for (const auto& id : ids) {
    try {
      const auto inputs = load_network_inputs(c.features_dir, id, c);
      const auto x = stack_inputs(inputs);
      const auto logits = ck.model.forward(x);
      const auto curve = to_prediction(logits.data, c.params.final_frame_rate(), c.params.final_pad);
      const auto b = pick_peaks(curve, threshold);
      byte_io::write_file(out / (id + ".txt"), serialize_boundary_list(b));
      std::printf("%s: %zu boundaries\n", id.c_str(), b.size());
    } catch (const CompatibilityError&) {
      throw;
    } catch (const std::exception& e) {
      ++failed;
      log_line("predict: " + id + ": " + e.what());
    }
  }
  return failed > 0 ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string checkpoint;
  std::string manifest = "split.tsv";
  std::string split = "val";
  std::optional<double> tolerance;
  std::optional<double> beta;
  std::string csv;
  std::string svg;
};

int cmd_sweep(const RunConfig& c, const SweepArgs& a) {
  const auto ck = open_checkpoint(c, a.checkpoint);
  const auto ids = split_ids(load_manifest(a.manifest), a.split);
  if (ids.empty()) throw UsageError("split '" + a.split + "' is empty");
  const auto examples = load_examples(c, ids);
  const double tol = a.tolerance.value_or(c.tolerance);
  const double beta = a.beta.value_or(c.beta);

  const auto ev = evaluate_set(ck.model, examples, c.threshold, tol);
  std::vector<CurveWithReference> data;
  for (std::size_t i = 0; i < examples.size(); ++i) data.push_back({ev.curves[i], examples[i].reference});
  const auto result = sweep_threshold(data, tol, beta);

  const fs::path csv = a.csv.empty() ? c.run_dir / "sweep.csv" : fs::path(a.csv);
  const fs::path svg = a.svg.empty() ? c.run_dir / "sweep.svg" : fs::path(a.svg);
  if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
  if (svg.has_parent_path()) fs::create_directories(svg.parent_path());
  byte_io::write_file(csv, sweep_csv(result));
  byte_io::write_file(svg, sweep_svg(result, "Threshold sweep (" + a.split + ")"));
  std::printf("optimum threshold %.3f, mean F %.4f (tolerance %.2f s, beta %.2f)\n",
              result.best_threshold, result.best_f, tol, beta);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string ref;
  std::string est;
  double tolerance = 0.5;
  double beta = 1.0;
  bool all = false;
  std::string out;
};

std::map<std::string, fs::path> list_txt(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError("directory " + dir.string() + " does not exist");
  std::map<std::string, fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") out[e.path().stem().string()] = e.path();
  }
  return out;
}

int cmd_evaluate(const EvaluateArgs& a) {
  const auto refs = list_txt(a.ref);
  const auto ests = list_txt(a.est);
  std::vector<ScoredPair> pairs;
  int unmatched = 0;
  for (const auto& [id, path] : refs) {
    const auto it = ests.find(id);
    if (it == ests.end()) {
      log_line("evaluate: no estimate for " + id);
      ++unmatched;
      continue;
    }
    pairs.push_back({id, parse_functions_file(path), parse_boundary_list(byte_io::read_file(it->second))});
  }
  for (const auto& [id, path] : ests) {
    if (!refs.contains(id)) {
      log_line("evaluate: no reference for " + id);
      ++unmatched;
    }
  }
  if (pairs.empty()) throw UsageError("no track ids shared by the reference and estimate directories");

  std::vector<std::pair<double, double>> grid = {{a.tolerance, a.beta}};
  if (a.all) grid = {{0.5, 1.0}, {0.5, 0.58}, {3.0, 1.0}, {3.0, 0.58}};
  std::vector<ScoreReport> reports;
  for (const auto& [tol, beta] : grid) reports.push_back(score_corpus(pairs, tol, beta));

  const auto table = report_table(reports);
  std::printf("%s", table.c_str());
  if (!a.out.empty()) {
    const fs::path out = a.out;
    fs::create_directories(out);
    for (const auto& r : reports) {
      char name[64];
      std::snprintf(name, sizeof(name), "scores_tol%.1f_beta%.2f.csv", r.tolerance, r.beta);
      byte_io::write_file(out / name, report_csv(r));
    }
    byte_io::write_file(out / "scores.txt", table);
  }
  return unmatched > 0 ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------------------

struct PlotArgs {
  std::string csv;
  std::string out;
  std::string title = "Threshold sweep";
};

int cmd_plot(const PlotArgs& a) {
  if (!fs::exists(a.csv)) throw UsageError("score table " + a.csv + " does not exist");
  const auto result = parse_sweep_csv(byte_io::read_file(a.csv));
  if (result.table.empty()) throw UsageError("score table " + a.csv + " has no rows");
  const fs::path out = a.out.empty() ? fs::path(a.csv).replace_extension(".svg") : fs::path(a.out);
  byte_io::write_file(out, sweep_svg(result, a.title));
  std::printf("wrote %s\n", out.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Music boundary detection with self-similarity lag matrices"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("-c,--config", config_path, "key = value configuration file");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic corpus with known boundaries");
  s->add_option("-o,--out", synth.out, "Output directory")->capture_default_str();
  s->add_option("-n,--tracks", synth.tracks, "Number of tracks")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  s->add_option("--split-seed", synth.split_seed, "Dataset split seed")->capture_default_str();
  s->add_option("--min-segments", synth.min_segments)->capture_default_str();
  s->add_option("--max-segments", synth.max_segments)->capture_default_str();
  s->add_option("--min-seconds", synth.min_seconds, "Shortest segment")->capture_default_str();
  s->add_option("--max-seconds", synth.max_seconds, "Longest segment")->capture_default_str();

  FeaturesArgs feat;
  auto* f = app.add_subcommand("features", "Compute finalized network inputs for every track");
  f->add_option("wavs", feat.wavs, "WAV files (default: every .wav in audio_dir)");
  f->add_option("-j,--jobs", feat.jobs, "Worker threads (default: logical cores)");
  f->add_flag("--force", feat.force, "Recompute even when up to date");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train the network on the manifest's train split");
  t->add_option("-m,--manifest", tr.manifest, "Split manifest")->capture_default_str();
  t->add_option("-e,--epochs", tr.epochs, "Override the configured epoch count");

  PredictArgs pr;
  auto* p = app.add_subcommand("predict", "Write boundary lists for tracks");
  p->add_option("tracks", pr.tracks, "Track ids");
  p->add_option("--checkpoint", pr.checkpoint, "Checkpoint (default: run_dir/checkpoint.bin)");
  p->add_option("-t,--threshold", pr.threshold, "Peak threshold (default from config)");
  p->add_option("-o,--out", pr.out, "Output directory (default: run_dir/predictions)");
  p->add_option("-m,--manifest", pr.manifest, "Take track ids from this manifest");
  p->add_option("--split", pr.split, "Manifest split")->capture_default_str();

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep-threshold", "Find the peak threshold maximising mean F");
  w->add_option("--checkpoint", sw.checkpoint, "Checkpoint (default: run_dir/checkpoint.bin)");
  w->add_option("-m,--manifest", sw.manifest, "Split manifest")->capture_default_str();
  w->add_option("--split", sw.split, "Manifest split")->capture_default_str();
  w->add_option("--tolerance", sw.tolerance, "Hit tolerance in seconds");
  w->add_option("--beta", sw.beta, "F-measure beta");
  w->add_option("--csv", sw.csv, "Score table output");
  w->add_option("--svg", sw.svg, "Plot output");

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Score estimated boundaries against references");
  e->add_option("--ref", ev.ref, "Reference annotation directory")->required();
  e->add_option("--est", ev.est, "Estimated boundary directory")->required();
  e->add_option("--tolerance", ev.tolerance)->capture_default_str()->check(CLI::PositiveNumber);
  e->add_option("--beta", ev.beta)->capture_default_str()->check(CLI::PositiveNumber);
  e->add_flag("--all", ev.all, "Report tolerances 0.5 and 3.0 with beta 1 and 0.58");
  e->add_option("-o,--out", ev.out, "Directory for CSV and text reports");

  PlotArgs pl;
  auto* g = app.add_subcommand("plot", "Render a sweep score table as SVG");
  g->add_option("csv", pl.csv, "threshold,precision,recall,f_beta table")->required();
  g->add_option("-o,--out", pl.out, "SVG path (default: next to the table)");
  g->add_option("--title", pl.title)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*s) return cmd_synth(synth);
    if (*e) return cmd_evaluate(ev);
    if (*g) return cmd_plot(pl);
    const auto config = resolve_config(config_path);
    if (*f) return cmd_features(config, feat);
    if (*t) return cmd_train(config, tr);
    if (*p) return cmd_predict(config, pr);
    if (*w) return cmd_sweep(config, sw);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitPartial;
  }
  return kExitUsage;
}
