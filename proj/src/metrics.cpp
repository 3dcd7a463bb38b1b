#include "cad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cad/errors.hpp"

namespace cad {

namespace {

std::optional<double> ratio(double num, double den) {
  if (den == 0) return std::nullopt;
  return num / den;
}

} // namespace

ConfusionMatrix confusion(std::span<const LabelPair> pairs) {
  if (pairs.empty()) throw DataError("confusion: no predictions");
  ConfusionMatrix cm;
  for (const auto& p : pairs) {
    if (p.truth == 1) (p.predicted == 1 ? cm.tp : cm.fn) += 1;
    else (p.predicted == 1 ? cm.fp : cm.tn) += 1;
  }
  return cm;
}

RocCurve roc_auc(std::span<const ScoredLabel> scored) {
  std::size_t pos = 0, neg = 0;
  for (const auto& s : scored) (s.truth == 1 ? pos : neg) += 1;
  if (pos == 0 || neg == 0) throw DataError("roc_auc: both classes must be present");
  std::vector<ScoredLabel> sorted(scored.begin(), scored.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.p_positive > b.p_positive; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0, fp = 0;
  const double P = static_cast<double>(pos), N = static_cast<double>(neg);
  for (std::size_t i = 0; i < sorted.size();) {
    const double score = sorted[i].p_positive;
    while (i < sorted.size() && sorted[i].p_positive == score) {
      (sorted[i].truth == 1 ? tp : fp) += 1;
      ++i;
    }
    const RocPoint pt{static_cast<double>(fp) / N, static_cast<double>(tp) / P, score};
    const auto& prev = curve.points.back();
    curve.auc += (pt.fpr - prev.fpr) * (pt.tpr + prev.tpr) / 2.0;
    curve.points.push_back(pt);
  }
  return curve;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm, std::span<const ScoredLabel> scored) {
  if (!scored.empty() && scored.size() != cm.total())
    throw DataError("compute_metrics: confusion matrix and scored list disagree in size");
  MetricsReport r;
  r.confusion = cm;
  const double tp = static_cast<double>(cm.tp), fp = static_cast<double>(cm.fp);
  const double fn = static_cast<double>(cm.fn), tn = static_cast<double>(cm.tn);
  const double n = tp + fp + fn + tn;
  r.accuracy = ratio(tp + tn, n);
  r.precision = ratio(tp, tp + fp);
  r.recall = ratio(tp, tp + fn);
  r.specificity = ratio(tn, tn + fp);
  if (r.precision && r.recall) r.f_measure = ratio(2 * *r.precision * *r.recall, *r.precision + *r.recall);
  r.mcc = ratio(tp * tn - fp * fn, std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)));
  if (n > 0) {
    const double po = (tp + tn) / n;
    const double pe = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / (n * n);
    r.kappa = ratio(po - pe, 1 - pe);
  }
  if (!scored.empty()) {
    double sq = 0;
    for (const auto& s : scored) {
      const double d = s.p_positive - (s.truth == 1 ? 1.0 : 0.0);
      sq += d * d;
    }
    r.rmse = std::sqrt(sq / static_cast<double>(scored.size()));
    const bool both = std::any_of(scored.begin(), scored.end(), [](auto& s) { return s.truth == 1; }) &&
                      std::any_of(scored.begin(), scored.end(), [](auto& s) { return s.truth != 1; });
    if (both) {
      auto curve = roc_auc(scored);
      r.roc_auc = curve.auc;
      r.roc_points = std::move(curve.points);
    }
  }
  return r;
}

nlohmann::json to_json(const MetricsReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"accuracy", opt(r.accuracy)},
          {"precision", opt(r.precision)},
          {"recall", opt(r.recall)},
          {"specificity", opt(r.specificity)},
          {"f_measure", opt(r.f_measure)},
          {"mcc", opt(r.mcc)},
          {"kappa", opt(r.kappa)},
          {"rmse", opt(r.rmse)},
          {"roc_auc", opt(r.roc_auc)},
          {"confusion", {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn}, {"tn", r.confusion.tn}}}};
}

} // namespace cad
