#include "focal/codec/video.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace focal::codec {

void VideoSequence::validate() const {
  if (frames.empty()) throw std::invalid_argument("video has no frames");
  for (std::size_t n = 0; n < frames.size(); ++n) {
    const auto& f = frames[n];
    if (f.width != width || f.height != height || f.pixels.size() != static_cast<std::size_t>(width) * height) {
      throw std::invalid_argument("frame " + std::to_string(n) + " does not match the video size");
    }
  }
}

Frame pad_to_multiple(const Frame& frame, int block) {
  const int w = (frame.width + block - 1) / block * block;
  const int h = (frame.height + block - 1) / block * block;
  if (w == frame.width && h == frame.height) return frame;
  Frame out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.at(x, y) = frame.at(std::min(x, frame.width - 1), std::min(y, frame.height - 1));
  }
  return out;
}

VideoSequence pad_to_multiple(const VideoSequence& video, int block) {
  VideoSequence out = video;
  for (auto& f : out.frames) f = pad_to_multiple(f, block);
  if (!out.frames.empty()) {
    out.width = out.frames.front().width;
    out.height = out.frames.front().height;
  }
  return out;
}

float bt601_luma(float r, float g, float b) { return 0.299f * r + 0.587f * g + 0.114f * b; }

double psnr(const Frame& reference, const Frame& test) {
  if (reference.width != test.width || reference.height != test.height) {
    throw std::invalid_argument("psnr: frame sizes differ");
  }
  double mse = 0.0;
  for (std::size_t k = 0; k < reference.pixels.size(); ++k) {
    const double d = reference.pixels[k] - test.pixels[k];
    mse += d * d;
  }
  mse /= static_cast<double>(reference.pixels.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace focal::codec
