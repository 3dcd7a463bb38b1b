#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

namespace cad {

/// 2x2 counts with CAD (label 1) as the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct LabelPair {
  int truth = 0;
  int predicted = 0;
};

struct ScoredLabel {
  int truth = 0;
  double p_positive = 0;
};

struct RocPoint {
  double fpr = 0;
  double tpr = 0;
  /// Score threshold (predict positive when score >= threshold); +inf for the origin.
  double threshold = 0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0;
};

/// Every metric is empty ("undefined") when its denominator is zero.
struct MetricsReport {
  std::optional<double> accuracy, precision, recall, specificity, f_measure, mcc, kappa, rmse, roc_auc;
  ConfusionMatrix confusion;
  std::vector<RocPoint> roc_points;
};

ConfusionMatrix confusion(std::span<const LabelPair> pairs);

/// Thresholds sweep the distinct scores in descending order; tied scores move
/// together; area by the trapezoid rule. Throws DataError unless both classes occur.
RocCurve roc_auc(std::span<const ScoredLabel> scored);

/// `scored` feeds RMSE and ROC; it may be empty, leaving those undefined.
MetricsReport compute_metrics(const ConfusionMatrix& cm, std::span<const ScoredLabel> scored);

nlohmann::json to_json(const MetricsReport& report);

} // namespace cad
