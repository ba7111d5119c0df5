#include "focal/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace focal {

ActivationMap activation_map(std::span<const double> feature_map, int count_u, int count_v, int source) {
  if (feature_map.empty()) throw std::invalid_argument("activation_map: empty map");
  if (feature_map.size() != static_cast<std::size_t>(count_u) * count_v) {
    throw std::invalid_argument("activation_map: size does not match the grid");
  }
  double mean = 0.0;
  for (const double v : feature_map) mean += v;
  mean /= static_cast<double>(feature_map.size());
  ActivationMap out{count_u, count_v, {}, source};
  out.values.reserve(feature_map.size());
  for (const double v : feature_map) out.values.push_back((v - mean) * (v - mean));
  return out;
}

std::vector<ActivationMap> activation_maps(const FeatureTensor& tensor) {
  std::vector<ActivationMap> maps;
  maps.reserve(static_cast<std::size_t>(tensor.length()));
  for (int k = 0; k < tensor.length(); ++k) {
    maps.push_back(activation_map(tensor.feature_map(k), tensor.count_u(), tensor.count_v(), k));
  }
  return maps;
}

double normalized_entropy(std::span<const double> values) {
  double total = 0.0;
  for (const double v : values) total += v;
  if (!(total > 0.0)) return 0.0;
  double h = 0.0;
  for (const double v : values) {
    if (v <= 0.0) continue;
    const double p = v / total;
    h -= p * std::log2(p);
  }
  return h;
}

double ver(const ActivationMap& map) {
  if (map.values.empty()) throw std::invalid_argument("ver: empty map");
  const auto n = static_cast<double>(map.values.size());
  double mean = 0.0;
  for (const double v : map.values) mean += v;
  mean /= n;
  double var = 0.0;
  for (const double v : map.values) var += (v - mean) * (v - mean);
  var /= n;
  if (var == 0.0) return 0.0;
  return var / (normalized_entropy(map.values) + kVerEpsilon);
}

FusedMap fuse(std::span<const ActivationMap> maps) {
  if (maps.empty()) throw std::invalid_argument("fuse: no activation maps");
  const auto& first = maps.front();
  for (const auto& m : maps) {
    if (m.count_u != first.count_u || m.count_v != first.count_v || m.values.size() != first.values.size()) {
      throw std::invalid_argument("fuse: activation maps have different shapes");
    }
  }
  FusedMap out;
  out.map = ActivationMap{first.count_u, first.count_v, std::vector<double>(first.values.size(), 0.0), -1};
  double total = 0.0;
  for (const auto& m : maps) {
    out.weights.push_back(ver(m));
    total += out.weights.back();
  }
  const bool degenerate = !(total > 0.0);
  for (std::size_t k = 0; k < maps.size(); ++k) {
    const double w = degenerate ? 1.0 : out.weights[k];
    if (w == 0.0) continue;
    for (std::size_t c = 0; c < out.map.values.size(); ++c) out.map.values[c] += w * maps[k].values[c];
  }
  const double norm = degenerate ? static_cast<double>(maps.size()) : total;
  for (auto& v : out.map.values) v /= norm;
  return out;
}

FusedMap localize(const FeatureTensor& tensor) {
  const auto maps = activation_maps(tensor);
  return fuse(maps);
}

PatchDecision classify_patches(const ActivationMap& fused, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("classify_patches: threshold must be non-negative");
  PatchDecision d;
  d.scores = fused.values;
  d.mask.reserve(d.scores.size());
  for (const double s : d.scores) d.mask.push_back(s > threshold);
  return d;
}

GrayImage render_heatmap(const ActivationMap& fused, int frame_width, int frame_height, int stride) {
  if (stride <= 0) throw std::invalid_argument("render_heatmap: stride must be positive");
  if ((fused.count_u - 1) * stride + kPatch > frame_width || (fused.count_v - 1) * stride + kPatch > frame_height) {
    throw std::invalid_argument("render_heatmap: grid does not fit the frame");
  }
  const auto [lo_it, hi_it] = std::minmax_element(fused.values.begin(), fused.values.end());
  const double lo = fused.values.empty() ? 0.0 : *lo_it;
  const double range = fused.values.empty() ? 0.0 : *hi_it - lo;
  const auto npix = static_cast<std::size_t>(frame_width) * frame_height;
  std::vector<double> sum(npix, 0.0);
  std::vector<int> cover(npix, 0);
  for (int i = 0; i < fused.count_u; ++i) {
    for (int j = 0; j < fused.count_v; ++j) {
      const double level = range > 0.0 ? 255.0 * (fused.at(i, j) - lo) / range : 0.0;
      for (int y = j * stride; y < j * stride + kPatch; ++y) {
        for (int x = i * stride; x < i * stride + kPatch; ++x) {
          const std::size_t k = static_cast<std::size_t>(y) * frame_width + x;
          sum[k] += level;
          ++cover[k];
        }
      }
    }
  }
  GrayImage img{frame_width, frame_height, std::vector<std::uint8_t>(npix, 0)};
  for (std::size_t k = 0; k < npix; ++k) {
    if (cover[k] > 0) img.pixels[k] = static_cast<std::uint8_t>(std::clamp(std::lround(sum[k] / cover[k]), 0L, 255L));
  }
  return img;
}

void write_score_csv(std::ostream& out, const ActivationMap& fused) {
  out << "row,col,score\n";
  out.precision(9);
  for (int j = 0; j < fused.count_v; ++j) {
    for (int i = 0; i < fused.count_u; ++i) out << j << ',' << i << ',' << fused.at(i, j) << '\n';
  }
}

}  // namespace focal
