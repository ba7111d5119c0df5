#include "focal/temporal.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace focal {
namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

double window_max(const std::vector<double>& v, long lo, long hi) {
  lo = std::max(0L, lo);
  hi = std::min(static_cast<long>(v.size()) - 1, hi);
  double m = v[lo];
  for (long k = lo + 1; k <= hi; ++k) m = std::max(m, v[k]);
  return m;
}

double comb_score(const std::vector<double>& v, int period, double floor) {
  int positions = 0;
  int hits = 0;
  const long half = period / 2;
  for (long n = period; n <= static_cast<long>(v.size()); n += period) {
    const long s = n - 1;  // array index of 1-based n
    ++positions;
    const double peak = window_max(v, s - 1, s + 1);
    if (peak > floor && peak >= window_max(v, s - half, s + half)) ++hits;
  }
  return positions ? static_cast<double>(hits) / positions : 0.0;
}

}  // namespace

DistanceSeries distance_series(std::span<const std::vector<float>> descriptors) {
  if (descriptors.size() < 2) throw std::invalid_argument("distance_series: need at least two frames");
  DistanceSeries s;
  s.values.reserve(descriptors.size() - 1);
  for (std::size_t n = 0; n + 1 < descriptors.size(); ++n) {
    const auto& a = descriptors[n];
    const auto& b = descriptors[n + 1];
    if (a.size() != b.size()) throw std::invalid_argument("distance_series: descriptor lengths differ");
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double diff = static_cast<double>(a[k]) - b[k];
      d += diff * diff;
    }
    s.values.push_back(d);
  }
  return s;
}

DistanceSeries distance_series(std::span<const FrameDescriptor> descriptors) {
  std::vector<std::vector<float>> f;
  f.reserve(descriptors.size());
  for (const auto& d : descriptors) f.push_back(d.f);
  return distance_series(std::span<const std::vector<float>>(f));
}

std::optional<PeriodEstimate> estimate_period(const DistanceSeries& series, const PeriodSearch& search) {
  const auto& v = series.values;
  if (v.size() < 4) return std::nullopt;
  const int max_p = search.max_period > 0 ? search.max_period : static_cast<int>(v.size() / 2);
  const double floor = search.prominence * median(v);
  std::optional<PeriodEstimate> best;
  for (int p = std::max(2, search.min_period); p <= max_p; ++p) {
    const double score = comb_score(v, p, floor);
    if (!best || score > best->score) best = PeriodEstimate{p, score};
  }
  if (!best || best->score < search.min_score) return std::nullopt;
  return best;
}

bool near_period_multiple(int n, int period) {
  if (period <= 0) return false;
  const int r = n % period;
  return r == 0 || r == 1 || r == period - 1;
}

namespace {

struct Suppression {
  std::optional<int> period;
  std::vector<bool> drop;  // by array index
};

Suppression plan_suppression(const DistanceSeries& series, const SpliceOptions& options) {
  Suppression s;
  s.drop.assign(series.size(), false);
  if (!options.suppress || series.size() == 0) return s;
  if (options.period_override) {
    s.period = *options.period_override;
  } else if (const auto est = estimate_period(series, options.search)) {
    s.period = est->period;
  }
  if (!s.period) return s;
  const double gate = options.relative_gate * *std::max_element(series.values.begin(), series.values.end());
  for (std::size_t k = 0; k < series.size(); ++k) {
    const int n = static_cast<int>(k) + 1;
    if (near_period_multiple(n, *s.period) && series.values[k] < gate) s.drop[k] = true;
  }
  return s;
}

}  // namespace

SpliceReport detect_splices(const DistanceSeries& series, const SpliceOptions& options) {
  if (options.threshold < 0.0) throw std::invalid_argument("detect_splices: threshold must be non-negative");
  SpliceReport report;
  report.threshold = options.threshold;
  const auto plan = plan_suppression(series, options);
  report.period = plan.period;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double v = series.values[k];
    if (!(v > options.threshold)) continue;
    const int reported = static_cast<int>(k) + 2;  // n + 1
    if (plan.drop[k]) {
      report.suppressed_indices.push_back(reported);
    } else {
      report.splice_indices.push_back(reported);
      report.peak_values.push_back(v);
    }
  }
  return report;
}

std::vector<double> suppressed_scores(const DistanceSeries& series, const SpliceOptions& options) {
  const auto plan = plan_suppression(series, options);
  std::vector<double> out = series.values;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (plan.drop[k]) out[k] = 0.0;
  }
  return out;
}

void write_splice_csv(std::ostream& out, const DistanceSeries& series, const SpliceReport& report) {
  out << "index,delta_f,suppressed\n";
  const auto is_suppressed = [&](int idx) {
    return std::find(report.suppressed_indices.begin(), report.suppressed_indices.end(), idx) !=
           report.suppressed_indices.end();
  };
  std::vector<int> all = report.splice_indices;
  all.insert(all.end(), report.suppressed_indices.begin(), report.suppressed_indices.end());
  std::sort(all.begin(), all.end());
  out.precision(9);
  for (const int idx : all) {
    out << idx << ',' << series.at(idx - 1) << ',' << (is_suppressed(idx) ? 1 : 0) << '\n';
  }
}

void write_series_plot(std::ostream& out, const DistanceSeries& series) {
  out.precision(9);
  for (std::size_t k = 0; k < series.size(); ++k) out << (k + 1) << ' ' << series.values[k] << '\n';
}

}  // namespace focal
