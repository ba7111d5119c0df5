#include "focal/codec/codec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace focal::codec {

char flavor_letter(Flavor f) { return static_cast<char>('A' + flavor_index(f)); }

int flavor_index(Flavor f) { return static_cast<int>(f); }

Flavor parse_flavor(std::string_view text) {
  if (text.size() == 1) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
    if (c >= 'A' && c <= 'D') return static_cast<Flavor>(c - 'A');
  }
  throw std::invalid_argument("unknown codec flavor '" + std::string(text) + "' (expected A, B, C or D)");
}

void CodecConfig::validate() const {
  if (!(delta > 0.0)) throw std::invalid_argument("quantization step must be positive");
}

const BlockTransform& transform_for(Flavor f) {
  switch (f) {
    case Flavor::B:
      return integer_dct_transform();
    case Flavor::D:
      return hadamard_transform();
    case Flavor::A:
    case Flavor::C:
      break;
  }
  return dct_transform();
}

double quant_weight(Flavor f, int u, int v) { return f == Flavor::C ? 1.0 + (u + v) / 4.0 : 1.0; }

Block8 quantize_block(const Block8& coefficients, const CodecConfig& config) {
  Block8 out;
  for (int u = 0; u < kBlock; ++u) {
    for (int v = 0; v < kBlock; ++v) {
      const double step = config.delta * quant_weight(config.flavor, u, v);
      out[u * kBlock + v] = step * std::round(coefficients[u * kBlock + v] / step);
    }
  }
  return out;
}

Frame encode_frame(const Frame& frame, const CodecConfig& config) {
  config.validate();
  if (frame.width % kBlock != 0 || frame.height % kBlock != 0) {
    throw std::invalid_argument("encode_frame: frame sides must be multiples of 8 (pad first)");
  }
  const auto& t = transform_for(config.flavor);
  Frame out(frame.width, frame.height);
  Block8 block;
  for (int by = 0; by < frame.height; by += kBlock) {
    for (int bx = 0; bx < frame.width; bx += kBlock) {
      for (int y = 0; y < kBlock; ++y) {
        for (int x = 0; x < kBlock; ++x) block[y * kBlock + x] = frame.at(bx + x, by + y);
      }
      const Block8 rec = t.invert(quantize_block(t.apply(block), config));
      for (int y = 0; y < kBlock; ++y) {
        for (int x = 0; x < kBlock; ++x) {
          out.at(bx + x, by + y) = static_cast<float>(std::clamp(rec[y * kBlock + x], 0.0, 255.0));
        }
      }
    }
  }
  return out;
}

VideoSequence encode_video(const VideoSequence& video, const CodecConfig& config, int gop_period) {
  video.validate();
  VideoSequence out = video;
  CodecConfig intra = config;
  intra.delta = config.delta / 2.0;
  for (std::size_t n = 0; n < video.frames.size(); ++n) {
    const bool refresh = gop_period > 0 && n % static_cast<std::size_t>(gop_period) == 0;
    out.frames[n] = encode_frame(video.frames[n], refresh ? intra : config);
  }
  return out;
}

QualityFamily parse_quality_family(std::string_view text) {
  if (text == "h264" || text == "h264-like") return QualityFamily::H264;
  if (text == "mpeg" || text == "mpeg-like") return QualityFamily::Mpeg;
  throw std::invalid_argument("unknown quality family '" + std::string(text) + "' (expected h264 or mpeg)");
}

double delta_from_q(QualityFamily family, int q) {
  if (family == QualityFamily::H264) {
    if (q < 1 || q > 51) throw std::out_of_range("h264-like q must lie in [1, 51]");
    return 5.0 / 8.0 * std::exp2(q / 6.0);
  }
  if (q < 1 || q > 31) throw std::out_of_range("mpeg-like q must lie in [1, 31]");
  if (q <= 4) return 8.0;
  if (q <= 8) return 2.0 * q;
  if (q <= 24) return q + 8.0;
  return 2.0 * q - 16.0;
}

double block_boundary_energy(const Frame& frame) {
  double sum = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < frame.height; ++y) {
    for (int x = kBlock; x < frame.width; x += kBlock) {
      const double d = frame.at(x, y) - frame.at(x - 1, y);
      sum += d * d;
      ++count;
    }
  }
  for (int y = kBlock; y < frame.height; y += kBlock) {
    for (int x = 0; x < frame.width; ++x) {
      const double d = frame.at(x, y) - frame.at(x, y - 1);
      sum += d * d;
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace focal::codec
