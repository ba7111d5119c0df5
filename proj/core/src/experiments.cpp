#include "focal/harness/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

#include "focal/digest.hpp"
#include "focal/random.hpp"

namespace focal::harness {

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

FeatureTensor TensorMemo::tensor(const codec::Frame& frame) {
  Fnv1a h;
  h.update_pod(frame.width);
  h.update_pod(frame.height);
  h.update_values(std::span<const float>(frame.pixels));
  const auto key = h.value();
  {
    std::lock_guard lock(mutex_);
    const auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto t = extractor_.feature_tensor(frame, stride_);
  std::lock_guard lock(mutex_);
  return cache_.emplace(key, std::move(t)).first->second;
}

std::vector<FeatureTensor> TensorMemo::tensors(const codec::VideoSequence& video) {
  std::vector<FeatureTensor> out;
  out.reserve(video.frames.size());
  for (const auto& f : video.frames) out.push_back(tensor(f));
  return out;
}

std::size_t TensorMemo::size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

std::vector<FrameDescriptor> frame_descriptors(std::span<const FeatureTensor> tensors, int first, int count) {
  std::vector<FrameDescriptor> out;
  out.reserve(tensors.size());
  for (std::size_t n = 0; n < tensors.size(); ++n) out.push_back(frame_descriptor(tensors[n].slice(first, count), n));
  return out;
}

std::vector<VersionPair> select_pairs(std::vector<VersionPair> pairs, int max_count, std::uint64_t seed) {
  if (max_count <= 0 || static_cast<std::size_t>(max_count) >= pairs.size()) return pairs;
  std::vector<std::size_t> idx(pairs.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  Rng rng(seed);
  rng.shuffle(idx.begin(), idx.end());
  idx.resize(static_cast<std::size_t>(max_count));
  std::sort(idx.begin(), idx.end());
  std::vector<VersionPair> out;
  for (const auto k : idx) out.push_back(pairs[k]);
  return out;
}

void temporal_clip_scores(const DistanceSeries& series, int splice_index, const SpliceOptions& options, int tolerance,
                          std::vector<double>& scores, std::vector<int>& labels) {
  const auto s = options.suppress ? suppressed_scores(series, options) : series.values;
  double positive = -1.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const int m = static_cast<int>(k) + 2;  // splice index of transition n = k + 1
    if (std::abs(m - splice_index) <= tolerance) {
      positive = std::max(positive, s[k]);
    } else {
      scores.push_back(s[k]);
      labels.push_back(0);
    }
  }
  if (positive >= 0.0) {
    scores.push_back(positive);
    labels.push_back(1);
  }
}

TemporalEvaluation evaluate_temporal(const DatasetD& d, const DatasetSpec& spec, const DescriptorExtractor& extractor,
                                     const TemporalEvalOptions& options) {
  const auto pairs = select_pairs(version_pairs(d), options.max_clips, options.seed);
  if (pairs.empty()) throw std::invalid_argument("evaluate_temporal: dataset has no version pairs");
  TensorMemo memo(extractor, options.stride);
  struct ClipResult {
    std::vector<double> scores[3];
    std::vector<int> labels[3];
    bool detected = false;
  };
  std::vector<ClipResult> results(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t c) {
    const auto clip = make_temporal_splice(d, pairs[c], spec);
    const auto tensors = memo.tensors(clip.video);
    const int length = extractor.length();
    const std::pair<int, int> variants[3] = {{0, length}, {kCodecOffset, kClassesPerModel}, {kQualityOffset, kClassesPerModel}};
    for (int v = 0; v < 3; ++v) {
      const auto series = distance_series(frame_descriptors(tensors, variants[v].first, variants[v].second));
      temporal_clip_scores(series, clip.splice_index, options.splice, options.tolerance, results[c].scores[v],
                           results[c].labels[v]);
      if (v == 0) {
        const auto report = detect_splices(series, options.splice);
        for (const int m : report.splice_indices) {
          if (std::abs(m - clip.splice_index) <= options.tolerance) results[c].detected = true;
        }
      }
    }
  });
  TemporalEvaluation out;
  out.clips = pairs.size();
  EvalCurve* curves[3] = {&out.concat, &out.codec_only, &out.quality_only};
  for (int v = 0; v < 3; ++v) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& r : results) {
      scores.insert(scores.end(), r.scores[v].begin(), r.scores[v].end());
      labels.insert(labels.end(), r.labels[v].begin(), r.labels[v].end());
    }
    *curves[v] = eval_curves(scores, labels);
  }
  for (const auto& r : results) out.detected += r.detected ? 1 : 0;
  return out;
}

std::vector<int> patch_labels(const PatchGrid& grid, const Window& window, double fraction) {
  std::vector<int> labels(grid.size(), 0);
  for (int i = 0; i < grid.count_u; ++i) {
    for (int j = 0; j < grid.count_v; ++j) {
      const int ox = std::max(0, std::min(grid.left(i) + kPatch, window.left + window.width) - std::max(grid.left(i), window.left));
      const int oy = std::max(0, std::min(grid.top(j) + kPatch, window.top + window.height) - std::max(grid.top(j), window.top));
      const double share = static_cast<double>(ox) * oy / (kPatch * kPatch);
      labels[grid.index(i, j)] = share >= fraction ? 1 : 0;
    }
  }
  return labels;
}

namespace {

struct SpatialVariants {
  std::vector<double> scores[6];
  std::vector<int> labels[6];
};

std::vector<FeatureTensor> window_tensors(const codec::VideoSequence& video, const DescriptorExtractor& extractor,
                                          const SpatialEvalOptions& options) {
  const int w = std::min<int>(options.window_frames, static_cast<int>(video.frames.size()));
  if (w < 1) throw std::invalid_argument("spatial evaluation: window of frames must be positive");
  std::vector<FeatureTensor> tensors;
  tensors.reserve(static_cast<std::size_t>(w));
  for (int n = 0; n < w; ++n) tensors.push_back(extractor.feature_tensor(video.frames[n], options.stride));
  return tensors;
}

}  // namespace

SpatialEvaluation evaluate_spatial(const DatasetD& d, const DatasetSpec& spec, const DescriptorExtractor& extractor,
                                   const SpatialEvalOptions& options) {
  const auto pairs = select_pairs(version_pairs(d), options.max_clips, options.seed);
  if (pairs.empty()) throw std::invalid_argument("evaluate_spatial: dataset has no version pairs");
  std::vector<SpatialVariants> results(pairs.size());
  const int length = extractor.length();
  const std::pair<int, int> variants[3] = {{0, length}, {kCodecOffset, kClassesPerModel}, {kQualityOffset, kClassesPerModel}};
  parallel_for(pairs.size(), [&](std::size_t c) {
    const auto clip = make_spatial_splice(d, pairs[c], spec);
    const auto tensors = window_tensors(clip.video, extractor, options);
    const auto labels = patch_labels(tensors.front().grid(), clip.window, options.label_fraction);
    const auto average = temporal_average(tensors);
    auto& r = results[c];
    for (int v = 0; v < 3; ++v) {
      for (const auto& t : tensors) {
        const auto fused = localize(t.slice(variants[v].first, variants[v].second));
        r.scores[v].insert(r.scores[v].end(), fused.map.values.begin(), fused.map.values.end());
        r.labels[v].insert(r.labels[v].end(), labels.begin(), labels.end());
      }
      const auto fused = localize(average.slice(variants[v].first, variants[v].second));
      r.scores[3 + v] = fused.map.values;
      r.labels[3 + v] = labels;
    }
  });
  SpatialEvaluation out;
  out.clips = pairs.size();
  EvalCurve* curves[6] = {&out.single_concat, &out.single_codec, &out.single_quality,
                          &out.multi_concat,  &out.multi_codec,  &out.multi_quality};
  for (int v = 0; v < 6; ++v) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& r : results) {
      scores.insert(scores.end(), r.scores[v].begin(), r.scores[v].end());
      labels.insert(labels.end(), r.labels[v].begin(), r.labels[v].end());
    }
    *curves[v] = eval_curves(scores, labels);
  }
  return out;
}

std::vector<double> robustness_scores(const DatasetD& d, const DatasetSpec& spec, const VersionPair& pair,
                                      const DescriptorExtractor& extractor, const SpatialEvalOptions& options,
                                      std::span<const double> deltas) {
  std::vector<double> out(deltas.size(), 0.0);
  parallel_for(deltas.size(), [&](std::size_t k) {
    DatasetSpec s = spec;
    s.reencode = true;
    s.reencode_config.delta = deltas[k];
    const auto clip = make_spatial_splice(d, pair, s);
    const auto tensors = window_tensors(clip.video, extractor, options);
    const auto labels = patch_labels(tensors.front().grid(), clip.window, options.label_fraction);
    const auto fused = localize(temporal_average(tensors));
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t c = 0; c < labels.size(); ++c) {
      if (labels[c]) {
        sum += fused.map.values[c];
        ++n;
      }
    }
    if (n == 0) throw std::invalid_argument("robustness_scores: window covers no patch");
    out[k] = sum / static_cast<double>(n);
  });
  return out;
}

}  // namespace focal::harness
