#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "focal/codec/video.hpp"
#include "focal/nn/model.hpp"
#include "focal/patching.hpp"

namespace focal {

// Descriptor layout: [f_C (4) | f_Q (4)]; further registered models append.
inline constexpr int kClassesPerModel = 4;
inline constexpr int kCodecOffset = 0;
inline constexpr int kQualityOffset = 4;
inline constexpr int kPairLength = 8;

struct PatchDescriptor {
  std::array<float, kClassesPerModel> codec{};
  std::array<float, kClassesPerModel> quality{};
  int i = 0;
  int j = 0;

  std::array<float, kPairLength> concatenated() const;
};

// Runs both four-class models on one 64x64 patch. Throws std::invalid_argument
// if either model does not have K = 4.
PatchDescriptor patch_descriptor(std::span<const float> patch, const nn::ModelWeights& codec_model,
                                 const nn::ModelWeights& quality_model);

// P_U x P_V x L descriptors of one frame. Cell (i, j) belongs to the patch
// whose top-left pixel is (i * stride, j * stride).
class FeatureTensor {
 public:
  FeatureTensor() = default;
  FeatureTensor(PatchGrid grid, int length) : grid_(grid), length_(length), data_(grid.size() * length, 0.0f) {}

  const PatchGrid& grid() const { return grid_; }
  int length() const { return length_; }
  int count_u() const { return grid_.count_u; }
  int count_v() const { return grid_.count_v; }

  float& at(int i, int j, int k) { return data_[grid_.index(i, j) * length_ + k]; }
  float at(int i, int j, int k) const { return data_[grid_.index(i, j) * length_ + k]; }
  std::span<float> cell(int i, int j) { return {data_.data() + grid_.index(i, j) * length_, static_cast<std::size_t>(length_)}; }
  std::span<const float> cell(int i, int j) const {
    return {data_.data() + grid_.index(i, j) * length_, static_cast<std::size_t>(length_)};
  }
  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

  // Feature map k as a row-major P_U x P_V matrix.
  std::vector<double> feature_map(int k) const;

  // Components [first, first + count) of every cell.
  FeatureTensor slice(int first, int count) const;

  bool same_layout(const FeatureTensor& other) const {
    return grid_.count_u == other.grid_.count_u && grid_.count_v == other.grid_.count_v && length_ == other.length_;
  }

  friend bool operator==(const FeatureTensor&, const FeatureTensor&) = default;

 private:
  PatchGrid grid_{};
  int length_ = 0;
  std::vector<float> data_;
};

// The set of registered classifiers; each contributes its K softmax outputs,
// in registration order, to every descriptor.
class DescriptorExtractor {
 public:
  DescriptorExtractor() = default;
  DescriptorExtractor(const nn::ModelWeights& codec_model, const nn::ModelWeights& quality_model);

  void add_model(const nn::ModelWeights& model);
  std::size_t model_count() const { return models_.size(); }
  int length() const;
  std::uint64_t digest() const;

  // Descriptors for a batch of patches, one row of length() per patch.
  std::vector<float> describe(std::span<const std::span<const float>> patches) const;

  FeatureTensor feature_tensor(const codec::Frame& frame, int stride) const;

 private:
  std::vector<const nn::ModelWeights*> models_;
};

inline constexpr int kInferenceBatch = 128;

FeatureTensor feature_tensor(const codec::Frame& frame, int stride, const DescriptorExtractor& extractor);

struct FrameDescriptor {
  std::vector<float> f;
  std::size_t frame_index = 0;
};

// Element-wise mean over patches of f_C and f_Q, concatenated.
FrameDescriptor frame_descriptor(std::span<const PatchDescriptor> patches, std::size_t frame_index = 0);

// Element-wise mean over all cells of a tensor.
FrameDescriptor frame_descriptor(const FeatureTensor& tensor, std::size_t frame_index = 0);

// Element-wise mean of W tensors sharing one grid.
FeatureTensor temporal_average(std::span<const FeatureTensor> tensors);

// Tensors for every frame of a video.
std::vector<FeatureTensor> video_tensors(const codec::VideoSequence& video, int stride,
                                         const DescriptorExtractor& extractor);

inline constexpr int kTemporalStride = 64;
inline constexpr int kSpatialStride = 8;

}  // namespace focal
