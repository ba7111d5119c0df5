#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "focal/descriptors.hpp"

namespace focal {

// A P_U x P_V map stored row-major (i outer, j inner), matching PatchGrid::index.
struct ActivationMap {
  int count_u = 0;
  int count_v = 0;
  std::vector<double> values;
  int source = -1;  // feature-map index k, or -1 for fused maps

  std::size_t size() const { return values.size(); }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * count_v + j]; }
};

// H_k = (F_k - mean(F_k))^2 element-wise.
ActivationMap activation_map(std::span<const double> feature_map, int count_u, int count_v, int source = -1);

// Activation maps for every feature map of a tensor.
std::vector<ActivationMap> activation_maps(const FeatureTensor& tensor);

inline constexpr double kVerEpsilon = 1e-9;

// Shannon entropy in bits of the map normalized to unit mass (0 for a zero map, 0 log 0 = 0).
double normalized_entropy(std::span<const double> values);

// Variance-to-entropy ratio: var(H) / (entropy(H) + eps). Constant maps score 0.
double ver(const ActivationMap& map);

struct FusedMap {
  ActivationMap map;
  std::vector<double> weights;  // VER per input map
};

// VER-weighted element-wise mean; falls back to the unweighted mean when every
// VER is zero. Throws std::invalid_argument on an empty set or mismatched shapes.
FusedMap fuse(std::span<const ActivationMap> maps);

// Full chain for one tensor: activations, VERs, fusion.
FusedMap localize(const FeatureTensor& tensor);

struct PatchDecision {
  std::vector<double> scores;
  std::vector<bool> mask;  // score > threshold
};

PatchDecision classify_patches(const ActivationMap& fused, double threshold);

// 8-bit heatmap of the frame: the map is min-max normalized to [0, 255] and
// each cell painted over its 64x64 footprint, overlaps averaged; pixels no
// patch covers stay 0. An all-equal map renders all zero.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

GrayImage render_heatmap(const ActivationMap& fused, int frame_width, int frame_height, int stride);

// Binary PGM (P5).
void write_pgm(std::ostream& out, const GrayImage& image);
GrayImage read_pgm(std::istream& in, const std::string& file = "<stream>");

// CSV rows "row,col,score" with row = j (vertical cell index), col = i.
void write_score_csv(std::ostream& out, const ActivationMap& fused);

}  // namespace focal
