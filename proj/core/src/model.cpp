#include "focal/nn/model.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "focal/digest.hpp"
#include "focal/error.hpp"
#include "focal/random.hpp"

namespace focal::nn {
namespace {

std::vector<std::uint32_t> dims_of(std::initializer_list<int> d) {
  std::vector<std::uint32_t> out;
  for (const int v : d) out.push_back(static_cast<std::uint32_t>(v));
  return out;
}

ParamBlock make_block(std::string name, std::initializer_list<int> dims, float fill = 0.0f) {
  ParamBlock block{std::move(name), dims_of(dims), {}};
  block.values.assign(block.element_count(), fill);
  return block;
}

void fill_uniform(ParamBlock& block, double bound, Rng& rng) {
  for (auto& v : block.values) v = static_cast<float>(rng.uniform(-bound, bound));
}

int conv5_side() {
  const auto specs = conv_layers(focal_architecture(2));
  return rf_chain(specs, kPatchSide).back().m;
}

}  // namespace

std::size_t ParamBlock::element_count() const {
  std::size_t n = 1;
  for (const auto d : dims) n *= d;
  return dims.empty() ? 0 : n;
}

bool operator==(const ParamBlock& a, const ParamBlock& b) {
  return a.name == b.name && a.dims == b.dims && a.values.size() == b.values.size() &&
         std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(float)) == 0;
}

bool operator==(const ModelWeights& a, const ModelWeights& b) {
  return a.num_classes == b.num_classes && a.blocks == b.blocks;
}

const ParamBlock* ModelWeights::find(std::string_view name) const {
  for (const auto& b : blocks) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

const ParamBlock& ModelWeights::get(std::string_view name) const {
  if (const auto* b = find(name)) return *b;
  throw ShapeError("model has no parameter block named " + std::string(name));
}

ParamBlock& ModelWeights::get(std::string_view name) {
  return const_cast<ParamBlock&>(std::as_const(*this).get(name));
}

std::size_t ModelWeights::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].name == name) return i;
  }
  throw ShapeError("model has no parameter block named " + std::string(name));
}

ModelConfig ModelWeights::config() const {
  ModelConfig cfg;
  cfg.num_classes = static_cast<int>(num_classes);
  const auto& conv1 = get("conv1.weight");
  if (conv1.dims.empty()) throw ShapeError("conv1.weight has no dimensions");
  cfg.width = static_cast<int>(conv1.dims[0]);
  if (const auto* sw = find("config.fc1_relu"); sw && !sw->values.empty()) cfg.fc1_relu = sw->values[0] != 0.0f;
  return cfg;
}

std::size_t ModelWeights::parameter_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks) {
    if (is_trainable(b.name)) n += b.values.size();
  }
  return n;
}

bool is_trainable(std::string_view name) {
  return !(name.ends_with(".running_mean") || name.ends_with(".running_var") || name.starts_with("config.") ||
           name.starts_with("input."));
}

void ModelWeights::validate() const {
  if (num_classes < 2) throw ShapeError("model must have at least two output classes");
  const ModelConfig cfg = config();
  if (cfg.width < 1) throw ShapeError("conv width must be positive");
  const auto expect = [this](const std::string& name, std::initializer_list<int> dims) {
    const auto& b = get(name);
    if (b.dims != dims_of(dims) || b.values.size() != b.element_count()) {
      throw ShapeError("parameter block " + name + " has an unexpected shape");
    }
  };
  const auto specs = focal_architecture(cfg.num_classes, cfg.width, cfg.fc1_relu);
  int in_ch = 1;
  for (int l = 0; l < kConvLayers; ++l) {
    const auto& s = specs[l];
    const std::string idx = std::to_string(l + 1);
    expect("conv" + idx + ".weight", {s.kernels, in_ch, s.kernel_size, s.kernel_size});
    expect("conv" + idx + ".bias", {s.kernels});
    for (const char* part : {".gamma", ".beta", ".running_mean", ".running_var"}) {
      expect("bn" + idx + part, {s.kernels});
    }
    for (const float v : get("bn" + idx + ".running_var").values) {
      if (!(v > 0.0f)) throw ShapeError("bn" + idx + ".running_var must be positive");
    }
    in_ch = s.kernels;
  }
  const int side = conv5_side();
  expect("fc1.weight", {kFc1Units, in_ch * side * side});
  expect("fc1.bias", {kFc1Units});
  expect("fc2.weight", {cfg.num_classes, kFc1Units});
  expect("fc2.bias", {cfg.num_classes});
  expect("input.normalization", {2});
}

ModelWeights init_weights(const ModelConfig& config, std::uint64_t seed) {
  if (config.num_classes < 2) throw std::invalid_argument("init_weights: need at least two classes");
  if (config.width < kMinWidth || config.width > kMaxWidth) {
    throw std::invalid_argument("init_weights: width must lie in [16, 64]");
  }
  Rng rng(seed);
  ModelWeights w;
  w.num_classes = static_cast<std::uint32_t>(config.num_classes);
  auto norm = make_block("input.normalization", {2});
  norm.values = {kInputScale, kInputOffset};
  w.blocks.push_back(std::move(norm));
  w.blocks.push_back(make_block("config.fc1_relu", {1}, config.fc1_relu ? 1.0f : 0.0f));

  const auto specs = focal_architecture(config.num_classes, config.width, config.fc1_relu);
  int in_ch = 1;
  for (int l = 0; l < kConvLayers; ++l) {
    const auto& s = specs[l];
    const std::string idx = std::to_string(l + 1);
    auto weight = make_block("conv" + idx + ".weight", {s.kernels, in_ch, s.kernel_size, s.kernel_size});
    const int fan_in = in_ch * s.kernel_size * s.kernel_size;
    fill_uniform(weight, std::sqrt(6.0 / fan_in), rng);
    w.blocks.push_back(std::move(weight));
    w.blocks.push_back(make_block("conv" + idx + ".bias", {s.kernels}));
    w.blocks.push_back(make_block("bn" + idx + ".gamma", {s.kernels}, 1.0f));
    w.blocks.push_back(make_block("bn" + idx + ".beta", {s.kernels}));
    w.blocks.push_back(make_block("bn" + idx + ".running_mean", {s.kernels}));
    w.blocks.push_back(make_block("bn" + idx + ".running_var", {s.kernels}, 1.0f));
    in_ch = s.kernels;
  }
  const int side = conv5_side();
  const int flat = in_ch * side * side;
  auto fc1 = make_block("fc1.weight", {kFc1Units, flat});
  fill_uniform(fc1, 1.0 / std::sqrt(static_cast<double>(flat)), rng);
  w.blocks.push_back(std::move(fc1));
  w.blocks.push_back(make_block("fc1.bias", {kFc1Units}));
  auto fc2 = make_block("fc2.weight", {config.num_classes, kFc1Units});
  fill_uniform(fc2, 1.0 / std::sqrt(static_cast<double>(kFc1Units)), rng);
  w.blocks.push_back(std::move(fc2));
  w.blocks.push_back(make_block("fc2.bias", {config.num_classes}));
  return w;
}

std::uint64_t weights_digest(const ModelWeights& weights) {
  Fnv1a h;
  h.update_pod(weights.num_classes);
  for (const auto& b : weights.blocks) {
    h.update(b.name);
    h.update_values(std::span<const std::uint32_t>(b.dims));
    h.update_values(std::span<const float>(b.values));
  }
  return h.value();
}

}  // namespace focal::nn
