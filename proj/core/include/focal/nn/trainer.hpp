#pragma once

#include <functional>
#include <span>
#include <vector>

#include "focal/nn/model.hpp"
#include "focal/nn/optimizer.hpp"

namespace focal::nn {

// Flat storage for labelled 64x64 luma patches.
class LabeledPatches {
 public:
  static constexpr std::size_t kPatchPixels = kPatchSide * kPatchSide;

  void add(std::span<const float> patch, int label);
  void reserve(std::size_t count);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::span<const float> patch(std::size_t i) const { return {pixels_.data() + i * kPatchPixels, kPatchPixels}; }
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const { return labels_; }

  // Per-class counts for labels 0..num_classes-1.
  std::vector<std::size_t> class_counts(int num_classes) const;

  // Patches at the given indices, in order.
  LabeledPatches subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<float> pixels_;
  std::vector<int> labels_;
};

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
  std::vector<std::vector<std::size_t>> confusion;  // [truth][predicted]
};

Evaluation evaluate(const ModelWeights& model, const LabeledPatches& data, int batch_size = 128);

struct EpochRecord {
  int epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  ModelWeights best;        // weights of the epoch with the lowest validation loss
  int best_epoch = -1;
  std::vector<EpochRecord> log;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Mini-batch training from `initial`. Batches are drawn from a seeded shuffle
// each epoch; a trailing batch of one sample is skipped since batch norm
// needs two. When `validation` is empty the training loss selects the epoch.
TrainResult train_classifier(ModelWeights initial, const LabeledPatches& train, const LabeledPatches& validation,
                             const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace focal::nn
