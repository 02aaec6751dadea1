#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sslmseg/boundary_set.hpp"
#include "sslmseg/evaluation.hpp"
#include "sslmseg/model.hpp"
#include "sslmseg/postprocess.hpp"

namespace sslmseg {

struct TrainExample {
  std::string id;
  Tensor4<float> input;
  std::vector<float> target;
  BoundarySet reference;
  double frame_rate = 0.0;
  int pad_frames = 0;
};

struct EpochRecord {
  int epoch = 0;
  std::string split;  // "train" or "val"
  double loss = 0.0;
  Prf score;
};

struct TrainOptions {
  int epochs = 100;
  std::uint64_t seed = 1;
  AdamHyper hyper;
  double threshold = 0.205;
  double tolerance = 0.5;
  /// Stops after an epoch whose training F1 reaches this value.
  std::optional<double> stop_at_train_f1;
  std::function<void(const EpochRecord&)> on_record;
};

struct TrainResult {
  Model<float> final_model;
  Model<float> best_model;
  AdamState<float> adam;
  int epochs_run = 0;
  int best_epoch = 0;
  std::vector<EpochRecord> log;
};

/// One Adam step per track per epoch, in a seeded shuffled order. Epoch 0
/// records the untrained model. The best model maximises validation F1
/// (lower validation loss breaks ties); without validation data it is the
/// final model.
TrainResult train(Model<float> model, const std::vector<TrainExample>& train_set,
                  const std::vector<TrainExample>& val_set, const TrainOptions& options);

struct SetEvaluation {
  double loss = 0.0;
  Prf score;  // per-track means
  std::vector<PredictionCurve> curves;
};

SetEvaluation evaluate_set(const Model<float>& model, const std::vector<TrainExample>& set,
                           double threshold, double tolerance);

inline constexpr std::string_view kTrainLogHeader = "epoch,split,loss,precision,recall,f1";
std::string format_log_row(const EpochRecord& r);
std::string training_log_csv(const std::vector<EpochRecord>& log);

}  // namespace sslmseg
