#include "focal/patching.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace focal {

PatchGrid make_grid(int width, int height, int stride) {
  if (stride <= 0 || stride % kCodingBlock != 0) {
    throw std::invalid_argument("patch stride " + std::to_string(stride) + " is not a positive multiple of 8");
  }
  if (width < kPatch || height < kPatch) {
    throw std::invalid_argument("frame " + std::to_string(width) + "x" + std::to_string(height) +
                                " is smaller than a 64x64 patch");
  }
  return {stride, (width - kPatch) / stride + 1, (height - kPatch) / stride + 1};
}

void copy_patch(const codec::Frame& frame, const PatchGrid& grid, int i, int j, std::span<float> out) {
  if (out.size() != static_cast<std::size_t>(kPatch * kPatch)) throw std::invalid_argument("copy_patch: bad buffer");
  const int x0 = grid.left(i);
  const int y0 = grid.top(j);
  if (x0 + kPatch > frame.width || y0 + kPatch > frame.height) throw std::out_of_range("copy_patch: outside frame");
  for (int y = 0; y < kPatch; ++y) {
    const auto row = frame.row(y0 + y).subspan(x0, kPatch);
    std::copy(row.begin(), row.end(), out.begin() + y * kPatch);
  }
}

std::vector<Patch> extract_patches(const codec::Frame& frame, int stride) {
  const PatchGrid grid = make_grid(frame.width, frame.height, stride);
  std::vector<Patch> patches;
  patches.reserve(grid.size());
  for (int i = 0; i < grid.count_u; ++i) {
    for (int j = 0; j < grid.count_v; ++j) {
      Patch p{i, j, std::vector<float>(kPatch * kPatch)};
      copy_patch(frame, grid, i, j, p.pixels);
      patches.push_back(std::move(p));
    }
  }
  return patches;
}

double patch_variance(std::span<const float> pixels) {
  if (pixels.empty()) return 0.0;
  double mean = 0.0;
  for (const float v : pixels) mean += v;
  mean /= static_cast<double>(pixels.size());
  double var = 0.0;
  for (const float v : pixels) var += (v - mean) * (v - mean);
  return var / static_cast<double>(pixels.size());
}

std::vector<Patch> variance_filter(std::vector<Patch> patches, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("variance threshold must be non-negative");
  std::erase_if(patches, [threshold](const Patch& p) { return !(patch_variance(p.pixels) > threshold); });
  return patches;
}

}  // namespace focal
