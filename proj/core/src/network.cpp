#include "focal/nn/network.hpp"

#include <algorithm>
#if defined(__GLIBC__)
#include <malloc.h>
#endif
#include <stdexcept>
#include <string>

namespace focal::nn {
namespace {

constexpr int kPatchPixels = kPatchSide * kPatchSide;

ConvGeometry conv_geometry(const ModelWeights& model, int layer) {
  const auto& w = model.get("conv" + std::to_string(layer + 1) + ".weight");
  static const auto specs = focal_architecture(2);
  const auto& s = specs[layer];
  return {static_cast<int>(w.dims[1]), static_cast<int>(w.dims[0]), s.kernel_size, s.stride, s.padding};
}

Tensor<float> normalize_input(const ModelWeights& model, const Tensor<float>& batch) {
  if (batch.c != 1 || batch.h != kPatchSide || batch.w != kPatchSide) {
    throw ShapeError("classifier input must be N x 1 x 64 x 64");
  }
  const auto norm = model.values("input.normalization");
  Tensor<float> x = batch;
  for (auto& v : x.data) v = v * norm[0] + norm[1];
  return x;
}

std::string idx(int layer) { return std::to_string(layer + 1); }

void add_into(std::vector<float>& dst, std::vector<float>&& src) {
  if (dst.empty()) {
    dst = std::move(src);
    return;
  }
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
}

}  // namespace

void keep_tensor_memory() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
}

Tensor<float> make_batch(std::span<const std::span<const float>> patches) {
  Tensor<float> batch(static_cast<int>(patches.size()), 1, kPatchSide, kPatchSide);
  for (std::size_t i = 0; i < patches.size(); ++i) {
    if (patches[i].size() != static_cast<std::size_t>(kPatchPixels)) {
      throw ShapeError("patch must contain exactly 64x64 pixels");
    }
    std::copy(patches[i].begin(), patches[i].end(), batch.sample(static_cast<int>(i)).begin());
  }
  return batch;
}

Tensor<float> infer_logits(const ModelWeights& model, const Tensor<float>& batch, Tensor<float>* conv5) {
  const ModelConfig cfg = model.config();
  Tensor<float> x = normalize_input(model, batch);
  for (int l = 0; l < kConvLayers; ++l) {
    const auto g = conv_geometry(model, l);
    x = conv_forward<float>(x, model.values("conv" + idx(l) + ".weight"), model.values("conv" + idx(l) + ".bias"), g);
    x = batchnorm_forward_infer<float>(x, {model.values("bn" + idx(l) + ".gamma"), model.values("bn" + idx(l) + ".beta")},
                                       model.values("bn" + idx(l) + ".running_mean"),
                                       model.values("bn" + idx(l) + ".running_var"), kBatchNorm);
    relu_inplace(x);
  }
  if (conv5) *conv5 = x;
  x = dense_forward<float>(x, model.values("fc1.weight"), model.values("fc1.bias"), kFc1Units);
  if (cfg.fc1_relu) relu_inplace(x);
  return dense_forward<float>(x, model.values("fc2.weight"), model.values("fc2.bias"), cfg.num_classes);
}

Tensor<float> predict(const ModelWeights& model, const Tensor<float>& batch) {
  Tensor<float> logits = infer_logits(model, batch);
  for (int i = 0; i < logits.n; ++i) {
    auto row = logits.sample(i);
    const auto p = softmax<float>(row);
    std::copy(p.begin(), p.end(), row.begin());
  }
  return logits;
}

std::vector<float> forward_full(std::span<const float> patch, const ModelWeights& model, Mode mode) {
  if (patch.size() != static_cast<std::size_t>(kPatchPixels)) {
    throw ShapeError("forward_full: patch must be exactly 64x64, got " + std::to_string(patch.size()) + " pixels");
  }
  if (mode == Mode::Train) {
    throw std::invalid_argument("forward_full: train mode needs a batch of at least 2 patches");
  }
  const std::span<const float> one[] = {patch};
  const auto probs = predict(model, make_batch(one));
  return {probs.data.begin(), probs.data.end()};
}

Tensor<float> TrainingPass::forward(ModelWeights& model, const Tensor<float>& batch) {
  const ModelConfig cfg = model.config();
  fc1_relu_ = cfg.fc1_relu;
  stages_.assign(kConvLayers, {});
  Tensor<float> x = normalize_input(model, batch);
  for (int l = 0; l < kConvLayers; ++l) {
    auto& stage = stages_[l];
    const auto g = conv_geometry(model, l);
    stage.input = std::move(x);
    Tensor<float> z = conv_forward<float>(stage.input, model.values("conv" + idx(l) + ".weight"),
                                          model.values("conv" + idx(l) + ".bias"), g);
    auto& rm = model.get("bn" + idx(l) + ".running_mean").values;
    auto& rv = model.get("bn" + idx(l) + ".running_var").values;
    stage.output = batchnorm_forward_train<float>(
        z, {model.values("bn" + idx(l) + ".gamma"), model.values("bn" + idx(l) + ".beta")}, rm, rv, kBatchNorm,
        stage.bn);
    relu_inplace(stage.output);
    x = stage.output;
  }
  fc1_input_ = std::move(x);
  fc1_output_ = dense_forward<float>(fc1_input_, model.values("fc1.weight"), model.values("fc1.bias"), kFc1Units);
  if (fc1_relu_) relu_inplace(fc1_output_);
  return dense_forward<float>(fc1_output_, model.values("fc2.weight"), model.values("fc2.bias"), cfg.num_classes);
}

Gradients TrainingPass::backward(const ModelWeights& model, const Tensor<float>& logit_grad) {
  if (stages_.size() != static_cast<std::size_t>(kConvLayers)) {
    throw std::logic_error("TrainingPass::backward called before forward");
  }
  Gradients grads;
  grads.blocks.resize(model.blocks.size());
  const auto put = [&](const std::string& name, std::vector<float>&& g) {
    add_into(grads.blocks[model.index_of(name)], std::move(g));
  };

  auto fc2 = dense_backward<float>(logit_grad, fc1_output_, model.values("fc2.weight"), model.config().num_classes);
  put("fc2.weight", std::move(fc2.weight));
  put("fc2.bias", std::move(fc2.bias));
  Tensor<float> dy = std::move(fc2.input);
  if (fc1_relu_) relu_backward_inplace(dy, fc1_output_);
  auto fc1 = dense_backward<float>(dy, fc1_input_, model.values("fc1.weight"), kFc1Units);
  put("fc1.weight", std::move(fc1.weight));
  put("fc1.bias", std::move(fc1.bias));
  dy = std::move(fc1.input);

  for (int l = kConvLayers - 1; l >= 0; --l) {
    auto& stage = stages_[l];
    relu_backward_inplace(dy, stage.output);
    auto bn = batchnorm_backward<float>(dy, stage.bn, model.values("bn" + idx(l) + ".gamma"));
    put("bn" + idx(l) + ".gamma", std::move(bn.gamma));
    put("bn" + idx(l) + ".beta", std::move(bn.beta));
    const auto g = conv_geometry(model, l);
    auto conv = conv_backward<float>(bn.input, stage.input, model.values("conv" + idx(l) + ".weight"), g, l > 0);
    put("conv" + idx(l) + ".weight", std::move(conv.weight));
    put("conv" + idx(l) + ".bias", std::move(conv.bias));
    dy = std::move(conv.input);
  }
  return grads;
}

BatchLoss batch_xent(const Tensor<float>& logits, std::span<const int> labels) {
  if (labels.size() != static_cast<std::size_t>(logits.n)) throw ShapeError("batch_xent: label count mismatch");
  BatchLoss out;
  out.gradient = Tensor<float>(logits.n, logits.c, logits.h, logits.w);
  const float inv_n = 1.0f / static_cast<float>(logits.n);
  for (int i = 0; i < logits.n; ++i) {
    const auto row = logits.sample(i);
    const auto lg = softmax_xent<float>(row, labels[i]);
    out.loss += lg.loss;
    const auto best = std::max_element(row.begin(), row.end()) - row.begin();
    if (best == labels[i]) ++out.correct;
    auto g = out.gradient.sample(i);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = lg.gradient[k] * inv_n;
  }
  out.loss /= logits.n;
  return out;
}

}  // namespace focal::nn
