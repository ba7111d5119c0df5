#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace focal::codec {

// One luma plane. Pixel (x, y) is column x of row y; values are real-valued
// luma on the 8-bit scale.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;

  Frame() = default;
  Frame(int w, int h, float fill = 0.0f) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  float& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  float at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::span<const float> row(int y) const { return {pixels.data() + static_cast<std::size_t>(y) * width, static_cast<std::size_t>(width)}; }

  friend bool operator==(const Frame&, const Frame&) = default;
};

// Ordered luma frames sharing one size. U = width, V = height.
struct VideoSequence {
  int width = 0;
  int height = 0;
  int fps_num = 30;
  int fps_den = 1;
  std::vector<Frame> frames;

  std::size_t frame_count() const { return frames.size(); }

  // Throws std::invalid_argument if empty or if any frame differs in size.
  void validate() const;

  friend bool operator==(const VideoSequence&, const VideoSequence&) = default;
};

// Pads right/bottom edges by replication so both sides are multiples of `block`.
Frame pad_to_multiple(const Frame& frame, int block = 8);
VideoSequence pad_to_multiple(const VideoSequence& video, int block = 8);

// BT.601 luma from 8-bit RGB.
float bt601_luma(float r, float g, float b);

double psnr(const Frame& reference, const Frame& test);

}  // namespace focal::codec
