#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "focal/codec/video.hpp"

namespace focal {

inline constexpr int kPatch = 64;
inline constexpr int kCodingBlock = 8;

// Grid of 64x64 patches anchored at (0, 0). Cell (i, j) covers columns
// [i*stride, i*stride + 64) and rows [j*stride, j*stride + 64); i runs along
// the frame width (U), j along the height (V). Partial border patches are dropped.
struct PatchGrid {
  int stride = kPatch;
  int count_u = 0;
  int count_v = 0;

  std::size_t size() const { return static_cast<std::size_t>(count_u) * count_v; }
  int left(int i) const { return i * stride; }
  int top(int j) const { return j * stride; }
  // Row-major cell index (i outer, j inner).
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * count_v + j; }

  friend bool operator==(const PatchGrid&, const PatchGrid&) = default;
};

// Throws std::invalid_argument when the stride is not a positive multiple of 8
// or the frame is smaller than one patch.
PatchGrid make_grid(int width, int height, int stride);

struct Patch {
  int i = 0;
  int j = 0;
  std::vector<float> pixels;  // 64 x 64, row-major
};

void copy_patch(const codec::Frame& frame, const PatchGrid& grid, int i, int j, std::span<float> out);

// All grid patches in row-major order.
std::vector<Patch> extract_patches(const codec::Frame& frame, int stride);

// Population variance of the luma values.
double patch_variance(std::span<const float> pixels);

// Keeps patches whose variance strictly exceeds `threshold`.
std::vector<Patch> variance_filter(std::vector<Patch> patches, double threshold);

inline constexpr double kDefaultVarianceThreshold = 1e3;

}  // namespace focal
