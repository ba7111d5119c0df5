#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "focal/descriptors.hpp"

namespace focal {

// values[n - 1] = |f(n) - f(n + 1)|^2 for 1-based frame index n = 1 .. N-1.
struct DistanceSeries {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  // Delta-f at 1-based n.
  double at(int n) const { return values.at(static_cast<std::size_t>(n - 1)); }
};

// Throws std::invalid_argument for fewer than two descriptors or mismatched lengths.
DistanceSeries distance_series(std::span<const FrameDescriptor> descriptors);
DistanceSeries distance_series(std::span<const std::vector<float>> descriptors);

struct PeriodSearch {
  int min_period = 8;
  int max_period = 0;          // 0: half the series length
  double min_score = 0.6;
  double prominence = 4.0;     // a peak must exceed this multiple of the series median
};

struct PeriodEstimate {
  int period = 0;
  double score = 0.0;
};

// Comb search over candidate periods p: the score of p is the fraction of
// multiples n = p, 2p, ... whose +-1 neighbourhood holds the maximum of the
// surrounding +-p/2 window and exceeds `prominence` times the series median.
// Returns the best-scoring (smallest on ties) period if its score reaches
// `min_score`.
std::optional<PeriodEstimate> estimate_period(const DistanceSeries& series, const PeriodSearch& search = {});

struct SpliceOptions {
  double threshold = 0.05;
  bool suppress = true;
  std::optional<int> period_override;
  double relative_gate = 0.25;  // periodic peaks below this fraction of the global max are dropped
  PeriodSearch search;
};

struct SpliceReport {
  std::vector<int> splice_indices;      // first frame of the second shot, 1-based (n + 1)
  std::vector<double> peak_values;
  double threshold = 0.0;
  std::vector<int> suppressed_indices;  // same convention
  std::optional<int> period;
};

SpliceReport detect_splices(const DistanceSeries& series, const SpliceOptions& options);

// True when 1-based n lies within one sample of a multiple of `period`.
bool near_period_multiple(int n, int period);

// Series with periodic peaks (as detect_splices would suppress them) set to zero.
// Used to score frame-wise ROC curves with suppression on.
std::vector<double> suppressed_scores(const DistanceSeries& series, const SpliceOptions& options);

// CSV: index,delta_f,suppressed (one row per frame whose Delta-f exceeds the threshold).
void write_splice_csv(std::ostream& out, const DistanceSeries& series, const SpliceReport& report);
// Whitespace-separated "n delta_f" rows for plotting.
void write_series_plot(std::ostream& out, const DistanceSeries& series);

}  // namespace focal
