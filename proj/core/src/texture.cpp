#include "focal/codec/texture.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "focal/random.hpp"

namespace focal::codec {
namespace {

int mirror(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
  return i;
}

std::vector<double> white_noise(int width, int height, Rng& rng) {
  std::vector<double> f(static_cast<std::size_t>(width) * height);
  for (auto& v : f) v = rng.normal();
  return f;
}

void standardize(std::vector<double>& f) {
  double mean = 0.0;
  for (const double v : f) mean += v;
  mean /= static_cast<double>(f.size());
  double var = 0.0;
  for (const double v : f) var += (v - mean) * (v - mean);
  var /= static_cast<double>(f.size());
  const double inv = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;
  for (auto& v : f) v = (v - mean) * inv;
}

std::vector<double> textured_field(int width, int height, const TextureParams& p, Rng& rng) {
  auto coarse = white_noise(width, height, rng);
  gaussian_blur(coarse, width, height, p.coarse_sigma);
  standardize(coarse);
  auto fine = white_noise(width, height, rng);
  gaussian_blur(fine, width, height, p.fine_sigma);
  standardize(fine);
  const double wf = std::clamp(p.fine_weight, 0.0, 1.0);
  const double a = std::sqrt(1.0 - wf * wf);
  std::vector<double> out(coarse.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a * coarse[k] + wf * fine[k];
  return out;
}

}  // namespace

void gaussian_blur(std::vector<double>& field, int width, int height, double sigma) {
  if (sigma <= 0.0) return;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    total += kernel[i + radius];
  }
  for (auto& k : kernel) k /= total;
  std::vector<double> tmp(field.size());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * field[static_cast<std::size_t>(y) * width + mirror(x + i, width)];
      tmp[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * tmp[static_cast<std::size_t>(mirror(y + i, height)) * width + x];
      field[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
}

VideoSequence gen_texture(int width, int height, int frames, std::uint64_t seed, const TextureParams& params) {
  if (width <= 0 || height <= 0 || width % 8 != 0 || height % 8 != 0) {
    throw std::invalid_argument("gen_texture: dimensions must be positive multiples of 8");
  }
  if (frames < 1) throw std::invalid_argument("gen_texture: need at least one frame");
  Rng rng(seed);
  const auto first = textured_field(width, height, params, rng);
  const auto second = textured_field(width, height, params, rng);

  std::vector<double> envelope(first.size(), 1.0);
  if (params.contrast_variation > 0.0) {
    auto g = white_noise(width, height, rng);
    gaussian_blur(g, width, height, params.envelope_sigma);
    standardize(g);
    const double cv = std::clamp(params.contrast_variation, 0.0, 1.0);
    for (std::size_t k = 0; k < g.size(); ++k) envelope[k] = (1.0 - cv) + cv / (1.0 + std::exp(-4.0 * g[k]));
  }
  const double angle = rng.uniform(0.0, 2.0 * M_PI);
  const double gx = std::cos(angle);
  const double gy = std::sin(angle);
  const double extent = std::abs(gx) * (width - 1) + std::abs(gy) * (height - 1);
  const double low = std::min(0.0, gx * (width - 1)) + std::min(0.0, gy * (height - 1));

  VideoSequence video;
  video.width = width;
  video.height = height;
  video.frames.reserve(frames);
  for (int n = 0; n < frames; ++n) {
    const double theta = params.drift * n;
    const double ca = std::cos(theta);
    const double sa = std::sin(theta);
    Frame f(width, height);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const std::size_t k = static_cast<std::size_t>(y) * width + x;
        const double ramp = extent > 0.0 ? ((gx * x + gy * y - low) / extent - 0.5) : 0.0;
        double v = params.mean + params.gradient * ramp;
        v += params.amplitude * envelope[k] * (ca * first[k] + sa * second[k]);
        f.pixels[k] = static_cast<float>(std::clamp(v, 0.0, 255.0));
      }
    }
    video.frames.push_back(std::move(f));
  }
  return video;
}

}  // namespace focal::codec
