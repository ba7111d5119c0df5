#pragma once

#include <cstdint>

#include "focal/codec/video.hpp"

namespace focal::codec {

// Procedural luma content: two Gaussian-filtered noise fields blended with a
// slowly rotating weight (temporal drift), modulated by an optional
// low-frequency contrast envelope, on top of a smooth gradient.
struct TextureParams {
  double mean = 128.0;
  double amplitude = 45.0;          // std of the textured component
  double gradient = 40.0;           // peak-to-peak of the smooth ramp
  double coarse_sigma = 4.0;        // pixels
  double fine_sigma = 1.0;
  double fine_weight = 0.35;        // share of the fine-scale component
  double contrast_variation = 0.0;  // 0 = uniform texture, 1 = flat and busy regions
  double envelope_sigma = 24.0;
  double drift = 0.03;              // radians per frame between the two fields
};

// Deterministic in (U, V, N, seed, params). U and V must be multiples of 8.
VideoSequence gen_texture(int width, int height, int frames, std::uint64_t seed, const TextureParams& params = {});

// Separable Gaussian blur with mirrored borders (exposed for reuse in tests).
void gaussian_blur(std::vector<double>& field, int width, int height, double sigma);

}  // namespace focal::codec
