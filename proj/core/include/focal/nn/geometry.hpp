#pragma once

#include <span>
#include <string>
#include <vector>

namespace focal::nn {

enum class LayerKind { Conv, FullyConnected };
enum class Activation { BatchNormRelu, Identity, Relu, Softmax };

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::Conv;
  int kernels = 1;
  int kernel_size = 1;  // w
  int stride = 1;       // s
  int padding = 0;      // z
  Activation activation = Activation::Identity;

  // Throws std::invalid_argument when w, s, z or the kernel count are out of range.
  void validate() const;
};

// Receptive-field geometry of one feature map: side length m, jump j,
// receptive-field size r and centre c of the first feature (all in pixels
// of the network input).
struct LayerGeom {
  int m = 0;
  int j = 0;
  int r = 0;
  double c = 0.0;

  friend bool operator==(const LayerGeom&, const LayerGeom&) = default;
};

// Input geometry seed: m0 = input side, j0 = r0 = 1, c0 = 0.5.
LayerGeom input_geometry(int input_side);

// Advances geometry through one spatial layer.
LayerGeom next_geometry(const LayerGeom& in, const LayerSpec& layer);

// One LayerGeom per conv layer in `specs` (the input layer is not included).
// Throws std::invalid_argument when a layer is not spatial, the input is
// smaller than the largest kernel, or a computed m is not positive.
std::vector<LayerGeom> rf_chain(std::span<const LayerSpec> specs, int input_side);

// The fixed five-conv, two-FC classifier architecture. `width` scales the
// number of conv kernels (default 64); geometry never changes.
std::vector<LayerSpec> focal_architecture(int num_classes, int width = 64, bool fc1_relu = false);

// Spatial (conv) prefix of an architecture.
std::vector<LayerSpec> conv_layers(std::span<const LayerSpec> specs);

inline constexpr int kPatchSide = 64;

}  // namespace focal::nn
