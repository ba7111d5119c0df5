#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "focal/nn/geometry.hpp"

namespace focal::nn {

// A named, row-major block of parameters. Batch-norm running statistics,
// input normalization constants and architecture switches are stored the
// same way so that a model is fully described by its blocks.
struct ParamBlock {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const;
};

struct ModelConfig {
  int num_classes = 4;
  int width = 64;         // conv kernels per layer; 16..64
  bool fc1_relu = false;  // FC-1 activation; identity unless switched on
};

struct ModelWeights {
  std::uint32_t num_classes = 0;
  std::vector<ParamBlock> blocks;

  const ParamBlock& get(std::string_view name) const;
  ParamBlock& get(std::string_view name);
  const ParamBlock* find(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;

  std::span<const float> values(std::string_view name) const { return get(name).values; }

  // Checks block shapes against the architecture implied by the config blocks,
  // positive running variances and K >= 2. Throws ShapeError otherwise.
  void validate() const;

  ModelConfig config() const;
  std::size_t parameter_count() const;

  friend bool operator==(const ModelWeights& a, const ModelWeights& b);
};

bool operator==(const ParamBlock& a, const ParamBlock& b);

// Running statistics, normalization constants and switches are not updated by
// the optimizer.
bool is_trainable(std::string_view block_name);

inline constexpr int kMinWidth = 16;
inline constexpr int kMaxWidth = 64;
inline constexpr int kConvLayers = 5;
inline constexpr int kFc1Units = 64;

// Pixel scale and offset applied to raw 0..255 luma before the first layer.
inline constexpr float kInputScale = 1.0f / 255.0f;
inline constexpr float kInputOffset = -0.5f;

// Fan-in scaled uniform initialization, deterministic in `seed`.
ModelWeights init_weights(const ModelConfig& config, std::uint64_t seed);

// FNV-1a digest over K and every block (name, dims, raw float bits).
std::uint64_t weights_digest(const ModelWeights& weights);

}  // namespace focal::nn
