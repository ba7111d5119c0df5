#pragma once

#include <span>
#include <vector>

#include "focal/nn/layers.hpp"
#include "focal/nn/model.hpp"
#include "focal/nn/tensor.hpp"

namespace focal::nn {

// Asks the C allocator to keep large freed blocks instead of returning them to
// the OS, so per-batch tensors are not page-faulted in afresh. Process-wide;
// a no-op outside glibc.
void keep_tensor_memory();

enum class Mode { Train, Infer };

inline constexpr BatchNormConfig kBatchNorm{0.9, 1e-5};

// Gradients aligned with ModelWeights::blocks; non-trainable blocks stay empty.
struct Gradients {
  std::vector<std::vector<float>> blocks;
};

// Packs raw 64x64 luma patches (row-major, 0..255) into an N x 1 x 64 x 64 batch.
Tensor<float> make_batch(std::span<const std::span<const float>> patches);

// Inference-mode forward pass returning logits (N x K). When `conv5` is given
// it receives the post-ReLU output of the last conv layer.
Tensor<float> infer_logits(const ModelWeights& model, const Tensor<float>& batch, Tensor<float>* conv5 = nullptr);

// Inference-mode class probabilities, N x K.
Tensor<float> predict(const ModelWeights& model, const Tensor<float>& batch);

// Probabilities for a single 64x64 patch. Train mode normalizes with batch
// statistics and is therefore rejected for a single patch.
std::vector<float> forward_full(std::span<const float> patch, const ModelWeights& model, Mode mode = Mode::Infer);

// One train-mode forward/backward pass over a batch. forward() updates the
// batch-norm running statistics held in `model`.
class TrainingPass {
 public:
  Tensor<float> forward(ModelWeights& model, const Tensor<float>& batch);
  Gradients backward(const ModelWeights& model, const Tensor<float>& logit_grad);

 private:
  struct ConvStage {
    Tensor<float> input;
    BatchNormCache<float> bn;
    Tensor<float> output;  // post-ReLU
  };
  std::vector<ConvStage> stages_;
  Tensor<float> fc1_input_;
  Tensor<float> fc1_output_;
  bool fc1_relu_ = false;
};

// Mean cross-entropy over a batch of logits plus its gradient (already divided
// by the batch size).
struct BatchLoss {
  double loss = 0.0;
  int correct = 0;
  Tensor<float> gradient;
};
BatchLoss batch_xent(const Tensor<float>& logits, std::span<const int> labels);

}  // namespace focal::nn
