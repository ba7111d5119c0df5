#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "focal/codec/codec.hpp"
#include "focal/codec/texture.hpp"
#include "focal/codec/video.hpp"
#include "focal/harness/config.hpp"

namespace focal::harness {

struct Window {
  int left = 0;
  int top = 0;
  int width = 0;
  int height = 0;
  std::size_t area() const { return static_cast<std::size_t>(width) * height; }
  bool contains(int x, int y) const { return x >= left && x < left + width && y >= top && y < top + height; }
  friend bool operator==(const Window&, const Window&) = default;
};

// Window of the given size centred in the frame with its top-left corner
// snapped down to the 8-pixel grid. Throws std::invalid_argument if it does not fit.
Window centered_window(int frame_width, int frame_height, int window_width, int window_height);

struct DatasetSpec {
  // Sources: `source_count` procedural textures, or Y4M files when `source_paths` is set.
  int source_count = 5;
  std::vector<std::filesystem::path> source_paths;
  int width = 640;
  int height = 480;
  int frames = 200;  // split in half for temporal splices
  codec::TextureParams texture;
  std::vector<codec::Flavor> flavors{codec::Flavor::A, codec::Flavor::B, codec::Flavor::C, codec::Flavor::D};
  std::vector<double> deltas{5.0, 10.0, 20.0, 40.0};
  int window_width = 352;
  int window_height = 288;
  bool reencode = true;
  codec::CodecConfig reencode_config{codec::Flavor::A, 2.0};
  int gop_period = 30;
  std::uint64_t seed = 2024;

  // Reads keys prefixed "dataset." (e.g. dataset.deltas=5,10,20,40).
  static DatasetSpec from_config(const Config& config);
  // Throws std::invalid_argument on an empty flavor or delta set, a
  // non-positive delta, fewer than two frames or a window that does not fit.
  void validate() const;
  int versions_per_source() const { return static_cast<int>(flavors.size() * deltas.size()); }
  Window window() const { return centered_window(width, height, window_width, window_height); }
};

struct EncodedVideo {
  int source = 0;
  codec::Flavor flavor = codec::Flavor::A;
  double delta = 0.0;
  codec::VideoSequence video;
  std::string id() const;  // e.g. "s0_B_d20"
};

// Every source encoded under every (flavor, delta), sources outer, flavors
// then deltas inner.
struct DatasetD {
  std::vector<EncodedVideo> videos;
  int sources = 0;
  int versions = 0;
  const EncodedVideo& version(int source, int v) const { return videos[static_cast<std::size_t>(source) * versions + v]; }
};

codec::VideoSequence load_source(const DatasetSpec& spec, int source);
DatasetD build_dataset_D(const DatasetSpec& spec);

// Unordered pair of versions of one source.
struct VersionPair {
  int source = 0;
  int first = 0;
  int second = 0;
};
std::vector<VersionPair> version_pairs(const DatasetD& d);

// Concatenation of `first_len` frames of x with the remaining frames of y.
// Throws std::invalid_argument if the sequences are not spliceable.
codec::VideoSequence splice_temporal(const codec::VideoSequence& x, const codec::VideoSequence& y, int first_len);

// Host frames with the window replaced by the co-located donor pixels.
codec::VideoSequence splice_spatial(const codec::VideoSequence& host, const codec::VideoSequence& donor,
                                    const Window& window);

// Per-frame re-encode after the forgery (no GOP refresh).
codec::VideoSequence reencode(const codec::VideoSequence& video, const codec::CodecConfig& config);

struct TemporalSplice {
  std::string id;
  VersionPair pair;
  codec::VideoSequence video;
  int splice_index = 0;  // 1-based first frame of the second shot
};

struct SpatialSplice {
  std::string id;
  VersionPair pair;
  codec::VideoSequence video;
  Window window;
  std::vector<std::uint8_t> mask;  // per pixel, 1 inside the window
};

TemporalSplice make_temporal_splice(const DatasetD& d, const VersionPair& pair, const DatasetSpec& spec);
SpatialSplice make_spatial_splice(const DatasetD& d, const VersionPair& pair, const DatasetSpec& spec);
std::vector<TemporalSplice> build_temporal_splices(const DatasetD& d, const DatasetSpec& spec);
std::vector<SpatialSplice> build_spatial_splices(const DatasetD& d, const DatasetSpec& spec);

}  // namespace focal::harness
