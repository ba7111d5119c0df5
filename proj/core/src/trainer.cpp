#include "focal/nn/trainer.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "focal/random.hpp"

namespace focal::nn {

void LabeledPatches::add(std::span<const float> patch, int label) {
  if (patch.size() != kPatchPixels) throw ShapeError("LabeledPatches: patch must be 64x64");
  if (label < 0) throw std::invalid_argument("LabeledPatches: negative label");
  pixels_.insert(pixels_.end(), patch.begin(), patch.end());
  labels_.push_back(label);
}

void LabeledPatches::reserve(std::size_t count) {
  pixels_.reserve(count * kPatchPixels);
  labels_.reserve(count);
}

std::vector<std::size_t> LabeledPatches::class_counts(int num_classes) const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (const int l : labels_) {
    if (l < num_classes) ++counts[l];
  }
  return counts;
}

LabeledPatches LabeledPatches::subset(std::span<const std::size_t> indices) const {
  LabeledPatches out;
  out.reserve(indices.size());
  for (const auto i : indices) out.add(patch(i), label(i));
  return out;
}

Evaluation evaluate(const ModelWeights& model, const LabeledPatches& data, int batch_size) {
  const int k = static_cast<int>(model.num_classes);
  Evaluation ev;
  ev.confusion.assign(k, std::vector<std::size_t>(k, 0));
  if (data.empty()) return ev;
  std::size_t correct = 0;
  double loss = 0.0;
  std::vector<std::span<const float>> views;
  std::vector<int> labels;
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    const std::size_t end = std::min(data.size(), start + static_cast<std::size_t>(batch_size));
    views.clear();
    labels.clear();
    for (std::size_t i = start; i < end; ++i) {
      views.push_back(data.patch(i));
      labels.push_back(data.label(i));
    }
    const auto logits = infer_logits(model, make_batch(views));
    const auto bl = batch_xent(logits, labels);
    loss += bl.loss * static_cast<double>(end - start);
    for (int i = 0; i < logits.n; ++i) {
      const auto row = logits.sample(i);
      const auto pred = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
      if (labels[i] < k) ++ev.confusion[labels[i]][pred];
      if (pred == labels[i]) ++correct;
    }
  }
  ev.loss = loss / static_cast<double>(data.size());
  ev.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return ev;
}

TrainResult train_classifier(ModelWeights initial, const LabeledPatches& train, const LabeledPatches& validation,
                             const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  initial.validate();
  if (train.size() < 2) throw std::invalid_argument("train_classifier: need at least two training patches");
  const int k = static_cast<int>(initial.num_classes);
  const auto counts = train.class_counts(k);
  for (int c = 0; c < k; ++c) {
    if (counts[c] == 0) throw std::invalid_argument("train_classifier: class " + std::to_string(c) + " has no training patches");
  }
  for (const int l : train.labels()) {
    if (l >= k) throw std::invalid_argument("train_classifier: label exceeds the model's class count");
  }

  TrainResult result;
  ModelWeights model = std::move(initial);
  OptimizerState state;
  TrainingPass pass;
  Rng rng(config.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<std::span<const float>> views;
  std::vector<int> labels;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = learning_rate_at(config, epoch);
    rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    std::size_t seen = 0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      if (end - start < 2) continue;
      views.clear();
      labels.clear();
      for (std::size_t i = start; i < end; ++i) {
        views.push_back(train.patch(order[i]));
        labels.push_back(train.label(order[i]));
      }
      const auto logits = pass.forward(model, make_batch(views));
      const auto bl = batch_xent(logits, labels);
      const auto grads = pass.backward(model, bl.gradient);
      optimizer_step(model, grads, state, config, lr);
      loss_sum += bl.loss * static_cast<double>(end - start);
      correct += static_cast<std::size_t>(bl.correct);
      seen += end - start;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.learning_rate = lr;
    rec.train_loss = seen ? loss_sum / static_cast<double>(seen) : 0.0;
    rec.train_accuracy = seen ? static_cast<double>(correct) / static_cast<double>(seen) : 0.0;
    double selector = rec.train_loss;
    if (!validation.empty()) {
      const auto ev = evaluate(model, validation);
      rec.val_loss = ev.loss;
      rec.val_accuracy = ev.accuracy;
      selector = ev.loss;
    }
    result.log.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (selector < best_loss) {
      best_loss = selector;
      result.best = model;
      result.best_epoch = epoch;
    }
  }
  if (result.best_epoch < 0) result.best = std::move(model);
  return result;
}

}  // namespace focal::nn
