#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "focal/codec/video.hpp"
#include "focal/descriptors.hpp"

namespace focal {

// Descriptor cache file:
//   "FOCD" | u32 frame count | u32 P_U | u32 P_V | u32 vector length |
//   frame-major, row-major (i outer, j inner), f32 little-endian values.
void write_descriptor_cache(std::ostream& out, std::span<const FeatureTensor> frames);

// `stride` is not stored in the file; it is attached to the returned grids.
std::vector<FeatureTensor> read_descriptor_cache(std::istream& in, int stride, const std::string& file = "<stream>");

void save_descriptor_cache(const std::filesystem::path& path, std::span<const FeatureTensor> frames);
std::vector<FeatureTensor> load_descriptor_cache(const std::filesystem::path& path, int stride);

std::uint64_t video_digest(const codec::VideoSequence& video);

// Directory of cache files keyed by (video content, model set, stride).
class DescriptorCache {
 public:
  explicit DescriptorCache(std::filesystem::path directory);

  std::filesystem::path path_for(std::uint64_t content_digest, std::uint64_t model_digest, int stride) const;

  // Loads cached tensors or computes and stores them.
  std::vector<FeatureTensor> tensors(const codec::VideoSequence& video, int stride, const DescriptorExtractor& extractor);

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  std::filesystem::path directory_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace focal
