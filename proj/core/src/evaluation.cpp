#include "focal/harness/evaluation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace focal::harness {

double OperatingPoint::tpr() const { return tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0; }
double OperatingPoint::fpr() const { return fp + tn ? static_cast<double>(fp) / static_cast<double>(fp + tn) : 0.0; }
double OperatingPoint::precision() const {
  return tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
}
double OperatingPoint::f1() const {
  const double denom = 2.0 * static_cast<double>(tp) + static_cast<double>(fp + fn);
  return denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
}

namespace {

double trapezoid(const std::vector<CurvePoint>& pts) {
  double area = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) area += (pts[k].x - pts[k - 1].x) * (pts[k].y + pts[k - 1].y) / 2.0;
  return area;
}

}  // namespace

EvalCurve eval_curves(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("eval_curves: score and label counts differ");
  std::size_t positives = 0;
  for (const int l : labels) {
    if (l != 0 && l != 1) throw std::invalid_argument("eval_curves: labels must be 0 or 1");
    positives += static_cast<std::size_t>(l);
  }
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) throw std::invalid_argument("eval_curves: need both positive and negative labels");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  EvalCurve c;
  c.roc.push_back({0.0, 0.0});
  c.pr.push_back({0.0, 1.0});
  c.best_f1_threshold = std::numeric_limits<double>::infinity();
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double t = scores[order[k]];
    while (k < order.size() && scores[order[k]] == t) {
      if (labels[order[k]]) {
        ++tp;
      } else {
        ++fp;
      }
      ++k;
    }
    OperatingPoint op{t, tp, fp, negatives - fp, positives - tp};
    c.roc.push_back({op.fpr(), op.tpr()});
    c.pr.push_back({op.tpr(), op.precision()});
    if (op.f1() > c.best_f1) {
      c.best_f1 = op.f1();
      c.best_f1_threshold = t;
    }
    c.points.push_back(op);
  }
  c.auc = trapezoid(c.roc);
  c.pr_auc = trapezoid(c.pr);
  return c;
}

void write_curve_csv(std::ostream& out, const EvalCurve& curve) {
  out << "threshold,tp,fp,tn,fn,tpr,fpr,precision,f1\n";
  for (const auto& p : curve.points) {
    out << p.threshold << ',' << p.tp << ',' << p.fp << ',' << p.tn << ',' << p.fn << ',' << p.tpr() << ','
        << p.fpr() << ',' << p.precision() << ',' << p.f1() << '\n';
  }
}

}  // namespace focal::harness
