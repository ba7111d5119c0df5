#include "focal/harness/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "focal/codec/y4m.hpp"
#include "focal/random.hpp"

namespace focal::harness {

using codec::CodecConfig;
using codec::VideoSequence;

Window centered_window(int frame_width, int frame_height, int window_width, int window_height) {
  if (window_width <= 0 || window_height <= 0 || window_width > frame_width || window_height > frame_height) {
    throw std::invalid_argument("window " + std::to_string(window_width) + "x" + std::to_string(window_height) +
                                " does not fit a " + std::to_string(frame_width) + "x" +
                                std::to_string(frame_height) + " frame");
  }
  Window w;
  w.width = window_width;
  w.height = window_height;
  w.left = (frame_width - window_width) / 2 / 8 * 8;
  w.top = (frame_height - window_height) / 2 / 8 * 8;
  return w;
}

DatasetSpec DatasetSpec::from_config(const Config& c) {
  DatasetSpec s;
  s.source_count = c.get_int("dataset.sources", s.source_count);
  for (const auto& p : c.get_strings("dataset.source_paths", {})) s.source_paths.emplace_back(p);
  s.width = c.get_int("dataset.width", s.width);
  s.height = c.get_int("dataset.height", s.height);
  s.frames = c.get_int("dataset.frames", s.frames);
  if (c.has("dataset.flavors")) {
    s.flavors.clear();
    for (const auto& f : c.get_strings("dataset.flavors", {})) s.flavors.push_back(codec::parse_flavor(f));
  }
  s.deltas = c.get_doubles("dataset.deltas", s.deltas);
  s.window_width = c.get_int("dataset.window_width", s.window_width);
  s.window_height = c.get_int("dataset.window_height", s.window_height);
  s.reencode = c.get_bool("dataset.reencode", s.reencode);
  if (c.has("dataset.reencode_flavor")) s.reencode_config.flavor = codec::parse_flavor(c.get("dataset.reencode_flavor", ""));
  s.reencode_config.delta = c.get_double("dataset.reencode_delta", s.reencode_config.delta);
  s.gop_period = c.get_int("dataset.gop_period", s.gop_period);
  s.seed = c.get_u64("dataset.seed", c.get_u64("seed", s.seed));
  s.texture.amplitude = c.get_double("texture.amplitude", s.texture.amplitude);
  s.texture.gradient = c.get_double("texture.gradient", s.texture.gradient);
  s.texture.contrast_variation = c.get_double("texture.contrast_variation", s.texture.contrast_variation);
  s.texture.drift = c.get_double("texture.drift", s.texture.drift);
  return s;
}

void DatasetSpec::validate() const {
  if (flavors.empty()) throw std::invalid_argument("dataset: flavor set is empty");
  if (deltas.empty()) throw std::invalid_argument("dataset: delta set is empty");
  for (const double d : deltas) {
    if (!(d > 0.0)) throw std::invalid_argument("dataset: quantization steps must be positive");
  }
  if (source_paths.empty() && source_count < 1) throw std::invalid_argument("dataset: need at least one source");
  if (frames < 2) throw std::invalid_argument("dataset: need at least two frames per video");
  if (gop_period < 0) throw std::invalid_argument("dataset: GOP period must be non-negative");
  if (source_paths.empty()) {
    if (width % 8 != 0 || height % 8 != 0) throw std::invalid_argument("dataset: frame sides must be multiples of 8");
    window();
  }
  if (reencode) reencode_config.validate();
}

std::string EncodedVideo::id() const {
  std::ostringstream os;
  os << 's' << source << '_' << codec::flavor_letter(flavor) << "_d" << delta;
  return os.str();
}

VideoSequence load_source(const DatasetSpec& spec, int source) {
  if (!spec.source_paths.empty()) {
    auto v = codec::pad_to_multiple(codec::load_y4m(spec.source_paths.at(static_cast<std::size_t>(source))), 8);
    if (static_cast<int>(v.frames.size()) > spec.frames) v.frames.resize(static_cast<std::size_t>(spec.frames));
    return v;
  }
  return codec::gen_texture(spec.width, spec.height, spec.frames, derive_seed(spec.seed, static_cast<std::uint64_t>(source)),
                            spec.texture);
}

DatasetD build_dataset_D(const DatasetSpec& spec) {
  spec.validate();
  DatasetD d;
  d.sources = spec.source_paths.empty() ? spec.source_count : static_cast<int>(spec.source_paths.size());
  d.versions = spec.versions_per_source();
  d.videos.reserve(static_cast<std::size_t>(d.sources) * d.versions);
  for (int s = 0; s < d.sources; ++s) {
    const auto source = load_source(spec, s);
    for (const auto f : spec.flavors) {
      for (const double delta : spec.deltas) {
        EncodedVideo ev;
        ev.source = s;
        ev.flavor = f;
        ev.delta = delta;
        ev.video = codec::encode_video(source, CodecConfig{f, delta}, spec.gop_period);
        d.videos.push_back(std::move(ev));
      }
    }
  }
  return d;
}

std::vector<VersionPair> version_pairs(const DatasetD& d) {
  std::vector<VersionPair> out;
  for (int s = 0; s < d.sources; ++s) {
    for (int a = 0; a < d.versions; ++a) {
      for (int b = a + 1; b < d.versions; ++b) out.push_back({s, a, b});
    }
  }
  return out;
}

namespace {

void require_spliceable(const VideoSequence& x, const VideoSequence& y) {
  x.validate();
  y.validate();
  if (x.width != y.width || x.height != y.height) {
    throw std::invalid_argument("sequences are not spliceable: frame sizes differ");
  }
}

std::string pair_id(const char* kind, const DatasetD& d, const VersionPair& p) {
  return std::string(kind) + "_" + d.version(p.source, p.first).id() + "__" + d.version(p.source, p.second).id();
}

}  // namespace

VideoSequence splice_temporal(const VideoSequence& x, const VideoSequence& y, int first_len) {
  require_spliceable(x, y);
  if (first_len < 1 || first_len > static_cast<int>(x.frames.size()) ||
      first_len >= static_cast<int>(y.frames.size())) {
    throw std::invalid_argument("splice_temporal: first shot length out of range");
  }
  VideoSequence z = x;
  z.frames.assign(x.frames.begin(), x.frames.begin() + first_len);
  z.frames.insert(z.frames.end(), y.frames.begin() + first_len, y.frames.end());
  return z;
}

VideoSequence splice_spatial(const VideoSequence& host, const VideoSequence& donor, const Window& window) {
  require_spliceable(host, donor);
  if (host.frames.size() != donor.frames.size()) throw std::invalid_argument("splice_spatial: frame counts differ");
  if (window.left < 0 || window.top < 0 || window.width <= 0 || window.height <= 0 ||
      window.left + window.width > host.width || window.top + window.height > host.height) {
    throw std::invalid_argument("splice_spatial: window out of bounds");
  }
  VideoSequence z = host;
  for (std::size_t n = 0; n < z.frames.size(); ++n) {
    for (int y = window.top; y < window.top + window.height; ++y) {
      const auto src = donor.frames[n].row(y);
      std::copy(src.begin() + window.left, src.begin() + window.left + window.width,
                z.frames[n].pixels.begin() + static_cast<std::ptrdiff_t>(y) * z.width + window.left);
    }
  }
  return z;
}

VideoSequence reencode(const VideoSequence& video, const CodecConfig& config) {
  return codec::encode_video(video, config, 0);
}

TemporalSplice make_temporal_splice(const DatasetD& d, const VersionPair& pair, const DatasetSpec& spec) {
  const auto& x = d.version(pair.source, pair.first).video;
  const auto& y = d.version(pair.source, pair.second).video;
  const int first_len = static_cast<int>(x.frames.size()) / 2;
  TemporalSplice t;
  t.id = pair_id("temporal", d, pair);
  t.pair = pair;
  t.video = splice_temporal(x, y, first_len);
  if (spec.reencode) t.video = reencode(t.video, spec.reencode_config);
  t.splice_index = first_len + 1;
  return t;
}

SpatialSplice make_spatial_splice(const DatasetD& d, const VersionPair& pair, const DatasetSpec& spec) {
  const auto& host = d.version(pair.source, pair.first).video;
  const auto& donor = d.version(pair.source, pair.second).video;
  SpatialSplice s;
  s.id = pair_id("spatial", d, pair);
  s.pair = pair;
  s.window = centered_window(host.width, host.height, spec.window_width, spec.window_height);
  s.video = splice_spatial(host, donor, s.window);
  if (spec.reencode) s.video = reencode(s.video, spec.reencode_config);
  s.mask.assign(static_cast<std::size_t>(host.width) * host.height, 0);
  for (int y = s.window.top; y < s.window.top + s.window.height; ++y) {
    std::fill_n(s.mask.begin() + static_cast<std::ptrdiff_t>(y) * host.width + s.window.left, s.window.width, 1);
  }
  return s;
}

std::vector<TemporalSplice> build_temporal_splices(const DatasetD& d, const DatasetSpec& spec) {
  std::vector<TemporalSplice> out;
  for (const auto& p : version_pairs(d)) out.push_back(make_temporal_splice(d, p, spec));
  return out;
}

std::vector<SpatialSplice> build_spatial_splices(const DatasetD& d, const DatasetSpec& spec) {
  std::vector<SpatialSplice> out;
  for (const auto& p : version_pairs(d)) out.push_back(make_spatial_splice(d, p, spec));
  return out;
}

}  // namespace focal::harness
