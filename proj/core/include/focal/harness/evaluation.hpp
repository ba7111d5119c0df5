#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace focal::harness {

struct OperatingPoint {
  double threshold = 0.0;  // predict positive when score >= threshold
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  double tpr() const;
  double fpr() const;
  double precision() const;  // 1 when nothing is predicted positive
  double f1() const;
};

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

struct EvalCurve {
  std::vector<OperatingPoint> points;  // thresholds in decreasing order
  std::vector<CurvePoint> roc;         // (FPR, TPR), starting at (0, 0)
  std::vector<CurvePoint> pr;          // (recall, precision), starting at (0, 1)
  double auc = 0.0;
  double pr_auc = 0.0;
  double best_f1 = 0.0;
  double best_f1_threshold = 0.0;
};

// Threshold sweep over the unique scores, trapezoidal ROC and PR areas, best
// F1 over the operating points. Throws std::invalid_argument unless both
// classes are present and the spans have equal length.
EvalCurve eval_curves(std::span<const double> scores, std::span<const int> labels);

// CSV "threshold,tp,fp,tn,fn,tpr,fpr,precision,f1".
void write_curve_csv(std::ostream& out, const EvalCurve& curve);

}  // namespace focal::harness
