#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cad/dataset.hpp"

namespace cad {

/// Discrete probability distribution; entries non-negative, summing to 1 (+-1e-9).
class Distribution {
public:
  explicit Distribution(std::vector<double> probabilities);
  static Distribution from_counts(std::span<const double> counts);
  const std::vector<double>& probabilities() const { return p_; }

private:
  std::vector<double> p_;
};

/// Shannon entropy in bits, with 0 log 0 = 0.
double entropy(const Distribution& dist);

struct Discretization {
  std::vector<int> codes;
  /// Upper (inclusive) edges of every bin but the last, strictly increasing.
  std::vector<double> edges;
  std::size_t bin_count() const { return edges.size() + 1; }
};

/// Equal-frequency binning into at most `bins` categories. A value equal to
/// an edge belongs to the lower bin.
Discretization discretize(std::span<const double> column, std::size_t bins = 10);
int bin_of(std::span<const double> edges, double v);

struct FeatureScore {
  std::string feature;
  /// Empty when the attribute is constant (intrinsic entropy 0).
  std::optional<double> gain_ratio;
  double info_gain = 0;
  double intrinsic_entropy = 0;
};

/// Gain ratio of an already-coded attribute against binary labels.
FeatureScore gain_ratio_of_codes(std::string feature, std::span<const int> attribute, std::span<const int> labels);

/// Numeric features are equal-frequency discretized first; other kinds use their codes.
FeatureScore gain_ratio(const Dataset& d, std::string_view feature, std::size_t bins = 10);

struct FeatureRanking {
  /// Every feature, best first.
  std::vector<FeatureScore> ranked;
  /// The top-k subset, ranked order.
  FeatureSchema selected;
};

/// Sorts by gain ratio desc (undefined last), then info gain desc, then schema order.
FeatureRanking rank_and_select(const Dataset& d, std::size_t k = 12, std::size_t bins = 10);

} // namespace cad
