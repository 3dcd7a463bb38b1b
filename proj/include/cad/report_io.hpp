#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cad/feature_selection.hpp"
#include "cad/metrics.hpp"
#include "cad/preprocess.hpp"
#include "cad/stats.hpp"
#include "cad/validation.hpp"

namespace cad {

/// Fixed-precision formatting; "NA" for undefined values.
std::string format_fixed(std::optional<double> v, int decimals);

std::string summary_csv(const SummaryTable& table);
std::string correlation_csv(const CorrelationMatrix& m);
/// feature, q1, q3, outlier_pct, extreme_pct
std::string outliers_csv(const OutlierReport& report);
/// rank, feature, gain_ratio, info_gain
std::string ranking_csv(const FeatureRanking& ranking);

/// Accuracy in percent with 2 decimals, everything else as a 4-decimal coefficient.
/// Failed pipelines keep their row with NA cells.
std::string report_csv(const std::vector<BenchmarkRow>& rows);
std::string roc_csv(const std::vector<RocPoint>& points);
/// One polyline per model on the unit square.
std::string roc_svg(const std::vector<BenchmarkRow>& rows);

/// Per-fold predictions, sorted by record index.
std::string predictions_csv(const CvResult& result);

void write_text_file(const std::string& path, const std::string& content);

} // namespace cad
