#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cad/dataset.hpp"

namespace cad {

struct FeatureScaling {
  std::string name;
  double mean = 0;
  double std = 1;
  bool operator==(const FeatureScaling&) const = default;
};

/// z-score parameters for the numeric features of a schema.
struct ScalingParams {
  std::vector<FeatureScaling> features;

  /// Scales values laid out in `schema` order. Features absent from the
  /// params (binary, ordinal, categorical) pass through unchanged.
  std::vector<double> apply(const FeatureSchema& schema, std::span<const double> values) const;

  bool operator==(const ScalingParams&) const = default;
};

nlohmann::json to_json(const ScalingParams& p);
ScalingParams scaling_from_json(const nlohmann::json& j);

/// Mean and sample std of every numeric feature. Throws DataError naming a
/// zero-variance feature.
ScalingParams fit_standardizer(const Dataset& train);
/// Throws DataError if a scaled feature is missing from d's schema.
Dataset apply_standardizer(const ScalingParams& params, const Dataset& d);

struct FeatureOutliers {
  std::string name;
  double q1 = 0, q3 = 0, iqr = 0;
  std::size_t outlier_count = 0;
  std::size_t extreme_count = 0;
  double outlier_pct = 0;
  double extreme_pct = 0;
  std::vector<std::size_t> outlier_rows;
  std::vector<std::size_t> extreme_rows;
};

struct OutlierReport {
  std::size_t record_count = 0;
  std::vector<FeatureOutliers> features;
  const FeatureOutliers* find(std::string_view name) const;
};

/// Interquartile-range filter. Report only; no records are removed.
/// By default only numeric features are examined.
OutlierReport iqr_flag(const Dataset& d, double outlier_factor = 1.5, double extreme_factor = 3.0,
                       bool include_coded = false);

struct SmoteConfig {
  enum class Target { balance, percentage };
  std::size_t k_neighbors = 5;
  Target target = Target::balance;
  /// Synthetic count as a percentage of the minority size (percentage mode).
  std::size_t percentage = 100;
  std::uint64_t seed = 1;
};

/// Number of synthetic records smote() will produce for d.
std::size_t smote_synthetic_count(const Dataset& d, const SmoteConfig& cfg);

/// Grows the minority class with interpolated records appended after the
/// originals. Each synthetic record carries its parent/neighbor indices.
Dataset smote(const Dataset& d, const SmoteConfig& cfg);

} // namespace cad
