#include "cad/feature_selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "cad/errors.hpp"

namespace cad {

Distribution::Distribution(std::vector<double> probabilities) : p_(std::move(probabilities)) {
  if (p_.empty()) throw ConfigError("Distribution: empty");
  double sum = 0;
  for (double p : p_) {
    if (!(p >= 0)) throw ConfigError("Distribution: negative or NaN probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("Distribution: probabilities sum to " + std::to_string(sum));
}

Distribution Distribution::from_counts(std::span<const double> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (!(total > 0)) throw ConfigError("Distribution: zero total count");
  std::vector<double> p;
  p.reserve(counts.size());
  for (double c : counts) p.push_back(c / total);
  return Distribution(std::move(p));
}

double entropy(const Distribution& dist) {
  double h = 0;
  for (double p : dist.probabilities())
    if (p > 0) h -= p * std::log2(p);
  return h;
}

int bin_of(std::span<const double> edges, double v) {
  // first edge >= v
  return static_cast<int>(std::lower_bound(edges.begin(), edges.end(), v) - edges.begin());
}

Discretization discretize(std::span<const double> column, std::size_t bins) {
  if (column.empty()) throw DataError("discretize: empty column");
  if (bins == 0) throw ConfigError("discretize: bins must be positive");
  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  Discretization out;
  for (std::size_t i = 1; i < bins; ++i) {
    const auto pos = (i * n) / bins;
    if (pos == 0) continue;
    const double edge = sorted[pos - 1];
    if (edge >= sorted.back()) break;
    if (out.edges.empty() || edge > out.edges.back()) out.edges.push_back(edge);
  }
  out.codes.reserve(n);
  for (double v : column) out.codes.push_back(bin_of(out.edges, v));
  return out;
}

FeatureScore gain_ratio_of_codes(std::string feature, std::span<const int> attribute, std::span<const int> labels) {
  if (attribute.size() != labels.size() || attribute.empty())
    throw DataError("gain_ratio: attribute and label lengths differ or are empty");
  std::map<int, std::array<double, 2>> table;
  std::array<double, 2> class_counts{0, 0};
  for (std::size_t i = 0; i < attribute.size(); ++i) {
    const int c = labels[i] == 1 ? 1 : 0;
    table[attribute[i]][c] += 1;
    class_counts[c] += 1;
  }
  const double n = static_cast<double>(attribute.size());
  const double h_class = entropy(Distribution::from_counts(class_counts));
  double conditional = 0;
  std::vector<double> value_counts;
  for (const auto& [value, counts] : table) {
    const double nv = counts[0] + counts[1];
    value_counts.push_back(nv);
    conditional += (nv / n) * entropy(Distribution::from_counts(counts));
  }
  FeatureScore s;
  s.feature = std::move(feature);
  s.info_gain = std::max(0.0, h_class - conditional);
  s.intrinsic_entropy = entropy(Distribution::from_counts(value_counts));
  if (s.intrinsic_entropy > 0) s.gain_ratio = s.info_gain / s.intrinsic_entropy;
  return s;
}

namespace {

std::vector<int> coded_column(const Dataset& d, std::size_t f, std::size_t bins) {
  const auto col = d.column(f);
  if (d.schema.features[f].is_numeric()) return discretize(col, bins).codes;
  std::map<double, int> codes;
  for (double v : col) codes.emplace(v, 0);
  int next = 0;
  for (auto& [v, c] : codes) c = next++;
  std::vector<int> out;
  out.reserve(col.size());
  for (double v : col) out.push_back(codes[v]);
  return out;
}

} // namespace

FeatureScore gain_ratio(const Dataset& d, std::string_view feature, std::size_t bins) {
  auto idx = d.schema.index_of(feature);
  if (!idx) throw DataError("gain_ratio: unknown feature '" + std::string(feature) + "'");
  const auto labels = d.labels();
  if (std::any_of(labels.begin(), labels.end(), [](int l) { return l < 0; }))
    throw DataError("gain_ratio: dataset has unlabelled records");
  return gain_ratio_of_codes(std::string(feature), coded_column(d, *idx, bins), labels);
}

FeatureRanking rank_and_select(const Dataset& d, std::size_t k, std::size_t bins) {
  if (k == 0 || k > d.schema.size())
    throw ConfigError("rank_and_select: k=" + std::to_string(k) + " outside 1.." + std::to_string(d.schema.size()));
  std::vector<std::pair<FeatureScore, std::size_t>> scored;
  for (std::size_t f = 0; f < d.schema.size(); ++f) scored.emplace_back(gain_ratio(d, d.schema.features[f].name, bins), f);
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    const auto& sa = a.first;
    const auto& sb = b.first;
    if (sa.gain_ratio.has_value() != sb.gain_ratio.has_value()) return sa.gain_ratio.has_value();
    if (sa.gain_ratio && *sa.gain_ratio != *sb.gain_ratio) return *sa.gain_ratio > *sb.gain_ratio;
    if (sa.info_gain != sb.info_gain) return sa.info_gain > sb.info_gain;
    return a.second < b.second;
  });
  FeatureRanking out;
  std::vector<std::string> names;
  for (auto& [score, f] : scored) {
    if (names.size() < k) names.push_back(score.feature);
    out.ranked.push_back(std::move(score));
  }
  out.selected = d.schema.project(names);
  return out;
}

} // namespace cad
