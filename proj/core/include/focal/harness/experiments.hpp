#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "focal/descriptors.hpp"
#include "focal/harness/dataset.hpp"
#include "focal/harness/evaluation.hpp"
#include "focal/spatial.hpp"
#include "focal/temporal.hpp"

namespace focal::harness {

// Runs fn(0..count-1) on up to `threads` workers (0: hardware concurrency).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned threads = 0);

// Memoizes per-frame descriptor tensors by frame content, so frames shared by
// several splices are described once.
class TensorMemo {
 public:
  TensorMemo(const DescriptorExtractor& extractor, int stride) : extractor_(extractor), stride_(stride) {}
  FeatureTensor tensor(const codec::Frame& frame);
  std::vector<FeatureTensor> tensors(const codec::VideoSequence& video);
  std::size_t size() const;
  int stride() const { return stride_; }

 private:
  const DescriptorExtractor& extractor_;
  int stride_;
  mutable std::mutex mutex_;
  std::map<std::uint64_t, FeatureTensor> cache_;
};

std::vector<FrameDescriptor> frame_descriptors(std::span<const FeatureTensor> tensors, int first, int count);

// Deterministic subset of at most `max_count` pairs (all when max_count <= 0),
// kept in their original order.
std::vector<VersionPair> select_pairs(std::vector<VersionPair> pairs, int max_count, std::uint64_t seed);

struct TemporalEvalOptions {
  SpliceOptions splice;
  int stride = kTemporalStride;
  int tolerance = 1;  // frames
  int max_clips = 0;
  std::uint64_t seed = 1;
};

// Frame-wise scores of one clip. Candidates are splice indices m = n + 1 for
// n = 1..N-1, scored by (suppressed) Delta-f. Candidates within `tolerance`
// of the truth collapse into one positive scored by their maximum.
void temporal_clip_scores(const DistanceSeries& series, int splice_index, const SpliceOptions& options,
                          int tolerance, std::vector<double>& scores, std::vector<int>& labels);

struct TemporalEvaluation {
  EvalCurve concat;
  EvalCurve codec_only;
  EvalCurve quality_only;
  std::size_t clips = 0;
  std::size_t detected = 0;  // clips whose detector output hits the truth within tolerance
};

TemporalEvaluation evaluate_temporal(const DatasetD& d, const DatasetSpec& spec, const DescriptorExtractor& extractor,
                                     const TemporalEvalOptions& options);

struct SpatialEvalOptions {
  int stride = kSpatialStride;
  int window_frames = 32;        // W for multi-frame averaging
  double label_fraction = 0.5;   // patch is forged when at least this share of its pixels is inside the window
  int max_clips = 0;
  std::uint64_t seed = 1;
};

// Per-cell ground truth for a window on a patch grid.
std::vector<int> patch_labels(const PatchGrid& grid, const Window& window, double fraction);

struct SpatialEvaluation {
  EvalCurve single_concat, single_codec, single_quality;
  EvalCurve multi_concat, multi_codec, multi_quality;
  std::size_t clips = 0;
};

SpatialEvaluation evaluate_spatial(const DatasetD& d, const DatasetSpec& spec, const DescriptorExtractor& extractor,
                                   const SpatialEvalOptions& options);

// Mean fused score over in-window cells of the multi-frame map of one spatial
// splice, re-encoded after the forgery at each step in `deltas`.
std::vector<double> robustness_scores(const DatasetD& d, const DatasetSpec& spec, const VersionPair& pair,
                                      const DescriptorExtractor& extractor, const SpatialEvalOptions& options,
                                      std::span<const double> deltas);

}  // namespace focal::harness
