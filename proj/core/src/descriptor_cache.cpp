#include "focal/descriptor_cache.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "focal/binary_io.hpp"
#include "focal/digest.hpp"

namespace focal {

void write_descriptor_cache(std::ostream& out, std::span<const FeatureTensor> frames) {
  const std::uint32_t count = static_cast<std::uint32_t>(frames.size());
  const FeatureTensor empty;
  const FeatureTensor& first = frames.empty() ? empty : frames.front();
  out.write("FOCD", 4);
  io::write_u32(out, count);
  io::write_u32(out, static_cast<std::uint32_t>(first.count_u()));
  io::write_u32(out, static_cast<std::uint32_t>(first.count_v()));
  io::write_u32(out, static_cast<std::uint32_t>(first.length()));
  for (const auto& t : frames) {
    if (!t.same_layout(first)) throw ShapeError("descriptor cache: frames have mismatched grids");
    io::write_f32(out, t.data());
  }
}

std::vector<FeatureTensor> read_descriptor_cache(std::istream& in, int stride, const std::string& file) {
  io::Reader r(in, file);
  r.expect_magic("FOCD");
  const auto count = r.u32("frame count");
  const auto pu = r.u32("P_U");
  const auto pv = r.u32("P_V");
  const auto len = r.u32("vector length");
  if (static_cast<std::uint64_t>(pu) * pv * len > (std::uint64_t{1} << 31)) r.fail("implausible descriptor grid");
  std::vector<FeatureTensor> frames;
  frames.reserve(count);
  const PatchGrid grid{stride, static_cast<int>(pu), static_cast<int>(pv)};
  for (std::uint32_t n = 0; n < count; ++n) {
    FeatureTensor t(grid, static_cast<int>(len));
    r.f32(t.data(), "descriptor values");
    frames.push_back(std::move(t));
  }
  return frames;
}

void save_descriptor_cache(const std::filesystem::path& path, std::span<const FeatureTensor> frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_descriptor_cache(out, frames);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<FeatureTensor> load_descriptor_cache(const std::filesystem::path& path, int stride) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string(), 0, "cannot open descriptor cache");
  return read_descriptor_cache(in, stride, path.string());
}

std::uint64_t video_digest(const codec::VideoSequence& video) {
  Fnv1a h;
  h.update_pod(video.width);
  h.update_pod(video.height);
  for (const auto& f : video.frames) h.update_values(std::span<const float>(f.pixels));
  return h.value();
}

DescriptorCache::DescriptorCache(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::filesystem::create_directories(directory_);
}

std::filesystem::path DescriptorCache::path_for(std::uint64_t content_digest, std::uint64_t model_digest,
                                                int stride) const {
  return directory_ / (to_hex(content_digest) + "_" + to_hex(model_digest) + "_s" + std::to_string(stride) + ".focd");
}

std::vector<FeatureTensor> DescriptorCache::tensors(const codec::VideoSequence& video, int stride,
                                                    const DescriptorExtractor& extractor) {
  const auto path = path_for(video_digest(video), extractor.digest(), stride);
  if (std::filesystem::exists(path)) {
    ++hits_;
    return load_descriptor_cache(path, stride);
  }
  ++misses_;
  auto frames = video_tensors(video, stride, extractor);
  save_descriptor_cache(path, frames);
  return frames;
}

}  // namespace focal
