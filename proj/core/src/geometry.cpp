#include "focal/nn/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace focal::nn {

void LayerSpec::validate() const {
  if (kernel_size < 1 || stride < 1 || padding < 0 || kernels < 1) {
    throw std::invalid_argument("layer " + name + ": require w >= 1, s >= 1, z >= 0, kernels >= 1");
  }
}

LayerGeom input_geometry(int input_side) { return {input_side, 1, 1, 0.5}; }

LayerGeom next_geometry(const LayerGeom& in, const LayerSpec& layer) {
  layer.validate();
  const int w = layer.kernel_size;
  const int s = layer.stride;
  const int z = layer.padding;
  LayerGeom out;
  const int span = in.m + 2 * z - w;
  // floor division; a negative span yields m <= 0 and is rejected by the caller
  out.m = (span >= 0 ? span / s : -((-span + s - 1) / s)) + 1;
  out.j = in.j * s;
  out.r = in.r + (w - 1) * in.j;
  out.c = in.c + ((w - 1) / 2.0 - z) * in.j;
  return out;
}

std::vector<LayerGeom> rf_chain(std::span<const LayerSpec> specs, int input_side) {
  if (specs.empty()) return {};
  int largest = 0;
  for (const auto& spec : specs) {
    if (spec.kind != LayerKind::Conv) {
      throw std::invalid_argument("rf_chain: layer " + spec.name + " is not spatial");
    }
    largest = std::max(largest, spec.kernel_size);
  }
  if (input_side < largest) {
    throw std::invalid_argument("rf_chain: input side " + std::to_string(input_side) +
                                " is smaller than the largest kernel");
  }
  std::vector<LayerGeom> chain;
  chain.reserve(specs.size());
  LayerGeom geom = input_geometry(input_side);
  for (const auto& spec : specs) {
    geom = next_geometry(geom, spec);
    if (geom.m <= 0) {
      throw std::invalid_argument("rf_chain: layer " + spec.name + " produces a non-positive feature map");
    }
    chain.push_back(geom);
  }
  return chain;
}

std::vector<LayerSpec> focal_architecture(int num_classes, int width, bool fc1_relu) {
  const auto conv = [width](std::string name, int w, int s, int z) {
    return LayerSpec{std::move(name), LayerKind::Conv, width, w, s, z, Activation::BatchNormRelu};
  };
  return {
      conv("conv1", 4, 1, 0),
      conv("conv2", 3, 2, 0),
      conv("conv3", 4, 1, 0),
      conv("conv4", 3, 2, 0),
      conv("conv5", 3, 2, 1),
      {"fc1", LayerKind::FullyConnected, 64, 1, 1, 0, fc1_relu ? Activation::Relu : Activation::Identity},
      {"fc2", LayerKind::FullyConnected, num_classes, 1, 1, 0, Activation::Softmax},
  };
}

std::vector<LayerSpec> conv_layers(std::span<const LayerSpec> specs) {
  std::vector<LayerSpec> out;
  for (const auto& spec : specs) {
    if (spec.kind == LayerKind::Conv) out.push_back(spec);
  }
  return out;
}

}  // namespace focal::nn
