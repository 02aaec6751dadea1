#include "sslmseg/train.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "sslmseg/error.hpp"
#include "sslmseg/random.hpp"

namespace sslmseg {

namespace {

Prf score_curve(const TrainExample& ex, std::span<const float> logits, double threshold,
                double tolerance) {
  const auto curve = to_prediction(logits, ex.frame_rate, ex.pad_frames);
  return prf(match_boundaries(ex.reference, pick_peaks(curve, threshold), tolerance), 1.0);
}

void check_loss(double loss, int epoch, const std::string& id) {
  if (!std::isfinite(loss)) {
    throw Error("non-finite training loss at epoch " + std::to_string(epoch) + " on track " + id +
                "; lower the learning rate or check the weight initialisation");
  }
}

void check_example(const TrainExample& ex, const Model<float>& model) {
  if (ex.input.h != model.input_height()) {
    throw DimensionError("track " + ex.id + " has input height " + std::to_string(ex.input.h) +
                         ", model expects " + std::to_string(model.input_height()));
  }
  if (ex.target.size() != static_cast<std::size_t>(ex.input.w)) {
    throw DimensionError("track " + ex.id + ": target length differs from input frames");
  }
}

}  // namespace

SetEvaluation evaluate_set(const Model<float>& model, const std::vector<TrainExample>& set,
                           double threshold, double tolerance) {
  SetEvaluation ev;
  ev.curves.resize(set.size());
  std::vector<double> losses(set.size());
  std::vector<Prf> scores(set.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& ex = set[i];
    const auto logits = model.forward(ex.input);
    losses[i] = bce_with_logits<float>(logits.data, ex.target).loss;
    ev.curves[i] = to_prediction(logits.data, ex.frame_rate, ex.pad_frames);
    scores[i] = prf(match_boundaries(ex.reference, pick_peaks(ev.curves[i], threshold), tolerance), 1.0);
  }
  if (set.empty()) return ev;
  const auto n = static_cast<double>(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    ev.loss += losses[i];
    ev.score.precision += scores[i].precision;
    ev.score.recall += scores[i].recall;
    ev.score.f += scores[i].f;
  }
  ev.loss /= n;
  ev.score.precision /= n;
  ev.score.recall /= n;
  ev.score.f /= n;
  return ev;
}

TrainResult train(Model<float> model, const std::vector<TrainExample>& train_set,
                  const std::vector<TrainExample>& val_set, const TrainOptions& options) {
  if (train_set.empty()) throw DomainError("training set is empty");
  if (options.epochs < 0) throw DomainError("epochs must be >= 0");
  for (const auto& ex : train_set) check_example(ex, model);
  for (const auto& ex : val_set) check_example(ex, model);

  TrainResult result;
  result.adam.hyper = options.hyper;
  auto record = [&](EpochRecord r) {
    if (options.on_record) options.on_record(r);
    result.log.push_back(std::move(r));
  };

  double best_f = -1.0;
  double best_loss = 0.0;
  auto consider_best = [&](int epoch) {
    if (val_set.empty()) return;
    const auto ev = evaluate_set(model, val_set, options.threshold, options.tolerance);
    check_loss(ev.loss, epoch, "validation");
    record({epoch, "val", ev.loss, ev.score});
    if (ev.score.f > best_f || (ev.score.f == best_f && ev.loss < best_loss)) {
      best_f = ev.score.f;
      best_loss = ev.loss;
      result.best_model = model;
      result.best_epoch = epoch;
    }
  };

  {
    const auto ev = evaluate_set(model, train_set, options.threshold, options.tolerance);
    check_loss(ev.loss, 0, "training set");
    record({0, "train", ev.loss, ev.score});
    consider_best(0);
  }

  std::vector<std::size_t> order(train_set.size());
  std::vector<std::vector<float>> params;
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix_seed(options.seed ^ mix_seed(static_cast<std::uint64_t>(epoch))));
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }

    double loss_sum = 0.0;
    Prf score_sum;
    for (std::size_t idx : order) {
      const auto& ex = train_set[idx];
      Trace<float> trace;
      const auto logits = model.forward(ex.input, &trace);
      const auto bce = bce_with_logits<float>(logits.data, ex.target);
      check_loss(bce.loss, epoch, ex.id);
      const auto s = score_curve(ex, logits.data, options.threshold, options.tolerance);
      loss_sum += bce.loss;
      score_sum.precision += s.precision;
      score_sum.recall += s.recall;
      score_sum.f += s.f;
      const auto grads = model.backward(trace, bce.grad);
      adam_step(model.params(), grads, result.adam);
    }
    const auto n = static_cast<double>(train_set.size());
    const Prf mean{score_sum.precision / n, score_sum.recall / n, score_sum.f / n};
    record({epoch, "train", loss_sum / n, mean});
    consider_best(epoch);
    result.epochs_run = epoch;
    if (options.stop_at_train_f1 && mean.f >= *options.stop_at_train_f1) break;
  }

  result.final_model = model;
  if (val_set.empty()) {
    result.best_model = model;
    result.best_epoch = result.epochs_run;
  }
  return result;
}

std::string format_log_row(const EpochRecord& r) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), "%d,%s,%.9g,%.6f,%.6f,%.6f", r.epoch, r.split.c_str(), r.loss,
                r.score.precision, r.score.recall, r.score.f);
  return buf;
}

std::string training_log_csv(const std::vector<EpochRecord>& log) {
  std::string out(kTrainLogHeader);
  out += '\n';
  for (const auto& r : log) out += format_log_row(r) + "\n";
  return out;
}

}  // namespace sslmseg
