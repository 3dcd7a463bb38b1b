#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cad/dataset.hpp"

namespace cad {

enum class QuantileMethod {
  /// h = (n-1)p, linear between closest ranks (pandas/numpy default).
  linear,
  /// h = (n+1)p clamped to [1, n] (exclusive, Minitab/Weka style).
  exclusive,
};

/// Quantile of an already sorted, non-empty sequence.
double quantile_sorted(std::span<const double> sorted, double p, QuantileMethod method = QuantileMethod::linear);

struct SummaryRow {
  std::string name;
  std::size_t count = 0;
  double mean = 0;
  /// Sample standard deviation; empty when count < 2.
  std::optional<double> std;
  double min = 0, q25 = 0, median = 0, q75 = 0, max = 0;
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
  const SummaryRow* find(std::string_view name) const;
};

/// One row per feature, then one for the label.
SummaryTable summarize(const Dataset& d, QuantileMethod method = QuantileMethod::linear);

struct CorrelationMatrix {
  std::vector<std::string> names;
  /// Row-major, size names.size()^2. Empty entries involve a zero-variance column.
  std::vector<std::optional<double>> values;

  std::optional<double> at(std::size_t i, std::size_t j) const { return values[i * names.size() + j]; }
  std::optional<double> at(std::string_view a, std::string_view b) const;
};

/// Pearson correlations over all features plus the label.
CorrelationMatrix correlation_matrix(const Dataset& d);

double mean_of(std::span<const double> v);
/// Sample (n-1) standard deviation; requires v.size() >= 2.
double sample_std(std::span<const double> v);

} // namespace cad
