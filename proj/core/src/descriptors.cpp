#include "focal/descriptors.hpp"

#include <algorithm>
#include <stdexcept>

#include "focal/digest.hpp"
#include "focal/nn/network.hpp"

namespace focal {

std::array<float, kPairLength> PatchDescriptor::concatenated() const {
  std::array<float, kPairLength> f{};
  std::copy(codec.begin(), codec.end(), f.begin());
  std::copy(quality.begin(), quality.end(), f.begin() + kQualityOffset);
  return f;
}

PatchDescriptor patch_descriptor(std::span<const float> patch, const nn::ModelWeights& codec_model,
                                 const nn::ModelWeights& quality_model) {
  if (codec_model.num_classes != kClassesPerModel || quality_model.num_classes != kClassesPerModel) {
    throw std::invalid_argument("patch_descriptor: codec and quality models must both have K = 4");
  }
  PatchDescriptor d;
  const auto c = nn::forward_full(patch, codec_model);
  const auto q = nn::forward_full(patch, quality_model);
  std::copy(c.begin(), c.end(), d.codec.begin());
  std::copy(q.begin(), q.end(), d.quality.begin());
  return d;
}

std::vector<double> FeatureTensor::feature_map(int k) const {
  if (k < 0 || k >= length_) throw std::out_of_range("feature map index out of range");
  std::vector<double> map(grid_.size());
  for (std::size_t c = 0; c < grid_.size(); ++c) map[c] = data_[c * length_ + k];
  return map;
}

FeatureTensor FeatureTensor::slice(int first, int count) const {
  if (first < 0 || count < 1 || first + count > length_) throw std::out_of_range("feature slice out of range");
  FeatureTensor out(grid_, count);
  for (std::size_t c = 0; c < grid_.size(); ++c) {
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(c * length_ + first), count,
                out.data_.begin() + static_cast<std::ptrdiff_t>(c * count));
  }
  return out;
}

DescriptorExtractor::DescriptorExtractor(const nn::ModelWeights& codec_model, const nn::ModelWeights& quality_model) {
  add_model(codec_model);
  add_model(quality_model);
}

void DescriptorExtractor::add_model(const nn::ModelWeights& model) {
  model.validate();
  models_.push_back(&model);
}

int DescriptorExtractor::length() const {
  int n = 0;
  for (const auto* m : models_) n += static_cast<int>(m->num_classes);
  return n;
}

std::uint64_t DescriptorExtractor::digest() const {
  Fnv1a h;
  for (const auto* m : models_) h.update_pod(nn::weights_digest(*m));
  return h.value();
}

std::vector<float> DescriptorExtractor::describe(std::span<const std::span<const float>> patches) const {
  if (models_.empty()) throw std::logic_error("DescriptorExtractor has no models");
  const int len = length();
  std::vector<float> out(patches.size() * len);
  const auto batch = nn::make_batch(patches);
  int offset = 0;
  for (const auto* m : models_) {
    const auto probs = nn::predict(*m, batch);
    const int k = static_cast<int>(m->num_classes);
    for (int i = 0; i < probs.n; ++i) {
      const auto row = probs.sample(i);
      std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(i) * len + offset);
    }
    offset += k;
  }
  return out;
}

FeatureTensor DescriptorExtractor::feature_tensor(const codec::Frame& frame, int stride) const {
  const PatchGrid grid = make_grid(frame.width, frame.height, stride);
  const int len = length();
  FeatureTensor tensor(grid, len);
  std::vector<float> buffer(static_cast<std::size_t>(kInferenceBatch) * kPatch * kPatch);
  std::vector<std::span<const float>> views;
  std::vector<std::pair<int, int>> cells;
  const auto flush = [&] {
    if (cells.empty()) return;
    const auto desc = describe(views);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::copy_n(desc.begin() + static_cast<std::ptrdiff_t>(c * len), len,
                  tensor.cell(cells[c].first, cells[c].second).begin());
    }
    views.clear();
    cells.clear();
  };
  for (int i = 0; i < grid.count_u; ++i) {
    for (int j = 0; j < grid.count_v; ++j) {
      std::span<float> slot(buffer.data() + cells.size() * kPatch * kPatch, kPatch * kPatch);
      copy_patch(frame, grid, i, j, slot);
      views.emplace_back(slot);
      cells.emplace_back(i, j);
      if (cells.size() == static_cast<std::size_t>(kInferenceBatch)) flush();
    }
  }
  flush();
  return tensor;
}

FeatureTensor feature_tensor(const codec::Frame& frame, int stride, const DescriptorExtractor& extractor) {
  return extractor.feature_tensor(frame, stride);
}

FrameDescriptor frame_descriptor(std::span<const PatchDescriptor> patches, std::size_t frame_index) {
  if (patches.empty()) throw std::invalid_argument("frame_descriptor: no patches");
  std::array<double, kPairLength> sum{};
  for (const auto& p : patches) {
    const auto f = p.concatenated();
    for (int k = 0; k < kPairLength; ++k) sum[k] += f[k];
  }
  FrameDescriptor d;
  d.frame_index = frame_index;
  for (const double s : sum) d.f.push_back(static_cast<float>(s / static_cast<double>(patches.size())));
  return d;
}

FrameDescriptor frame_descriptor(const FeatureTensor& tensor, std::size_t frame_index) {
  const std::size_t cells = tensor.grid().size();
  if (cells == 0) throw std::invalid_argument("frame_descriptor: no patches");
  std::vector<double> sum(static_cast<std::size_t>(tensor.length()), 0.0);
  for (std::size_t c = 0; c < cells; ++c) {
    for (int k = 0; k < tensor.length(); ++k) sum[k] += tensor.data()[c * tensor.length() + k];
  }
  FrameDescriptor d;
  d.frame_index = frame_index;
  for (const double s : sum) d.f.push_back(static_cast<float>(s / static_cast<double>(cells)));
  return d;
}

FeatureTensor temporal_average(std::span<const FeatureTensor> tensors) {
  if (tensors.empty()) throw std::invalid_argument("temporal_average: empty window");
  const auto& first = tensors.front();
  std::vector<double> sum(first.data().size(), 0.0);
  for (const auto& t : tensors) {
    if (!t.same_layout(first)) throw std::invalid_argument("temporal_average: tensors have mismatched grids");
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += t.data()[k];
  }
  FeatureTensor out(first.grid(), first.length());
  const auto w = static_cast<double>(tensors.size());
  for (std::size_t k = 0; k < sum.size(); ++k) out.data()[k] = static_cast<float>(sum[k] / w);
  return out;
}

std::vector<FeatureTensor> video_tensors(const codec::VideoSequence& video, int stride,
                                         const DescriptorExtractor& extractor) {
  std::vector<FeatureTensor> out;
  out.reserve(video.frames.size());
  for (const auto& f : video.frames) out.push_back(extractor.feature_tensor(f, stride));
  return out;
}

}  // namespace focal
