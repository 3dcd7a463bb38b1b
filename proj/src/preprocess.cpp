#include "cad/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cad/errors.hpp"
#include "cad/rng.hpp"
#include "cad/stats.hpp"

namespace cad {

std::vector<double> ScalingParams::apply(const FeatureSchema& schema, std::span<const double> values) const {
  std::vector<double> out(values.begin(), values.end());
  for (const auto& fs : features) {
    auto idx = schema.index_of(fs.name);
    if (!idx) continue;
    out[*idx] = (out[*idx] - fs.mean) / fs.std;
  }
  return out;
}

nlohmann::json to_json(const ScalingParams& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& f : p.features) arr.push_back({{"name", f.name}, {"mean", f.mean}, {"std", f.std}});
  return arr;
}

ScalingParams scaling_from_json(const nlohmann::json& j) {
  ScalingParams p;
  for (const auto& e : j)
    p.features.push_back({e.at("name").get<std::string>(), e.at("mean").get<double>(), e.at("std").get<double>()});
  return p;
}

ScalingParams fit_standardizer(const Dataset& train) {
  if (train.size() < 2) throw DataError("fit_standardizer: need at least 2 records");
  ScalingParams p;
  for (std::size_t f = 0; f < train.schema.size(); ++f) {
    const auto& spec = train.schema.features[f];
    if (!spec.is_numeric()) continue;
    const auto col = train.column(f);
    const double sd = sample_std(col);
    if (!(sd > 0)) throw DataError("fit_standardizer: feature '" + spec.name + "' has zero variance");
    p.features.push_back({spec.name, mean_of(col), sd});
  }
  return p;
}

Dataset apply_standardizer(const ScalingParams& params, const Dataset& d) {
  for (const auto& fs : params.features)
    if (!d.schema.index_of(fs.name))
      throw DataError("apply_standardizer: schema mismatch, dataset lacks feature '" + fs.name + "'");
  Dataset out = d;
  for (auto& r : out.records) r.values = params.apply(d.schema, r.values);
  out.provenance += " | standardized";
  return out;
}

const FeatureOutliers* OutlierReport::find(std::string_view name) const {
  for (const auto& f : features)
    if (f.name == name) return &f;
  return nullptr;
}

OutlierReport iqr_flag(const Dataset& d, double outlier_factor, double extreme_factor, bool include_coded) {
  if (d.empty()) throw DataError("iqr_flag: empty dataset");
  OutlierReport rep;
  rep.record_count = d.size();
  const double n = static_cast<double>(d.size());
  for (std::size_t f = 0; f < d.schema.size(); ++f) {
    const auto& spec = d.schema.features[f];
    if (!spec.is_numeric() && !include_coded) continue;
    const auto col = d.column(f);
    auto sorted = col;
    std::sort(sorted.begin(), sorted.end());
    FeatureOutliers fo;
    fo.name = spec.name;
    fo.q1 = quantile_sorted(sorted, 0.25);
    fo.q3 = quantile_sorted(sorted, 0.75);
    fo.iqr = fo.q3 - fo.q1;
    for (std::size_t r = 0; r < col.size(); ++r) {
      const double v = col[r];
      if (v < fo.q1 - extreme_factor * fo.iqr || v > fo.q3 + extreme_factor * fo.iqr) {
        fo.extreme_rows.push_back(r);
      } else if (v < fo.q1 - outlier_factor * fo.iqr || v > fo.q3 + outlier_factor * fo.iqr) {
        fo.outlier_rows.push_back(r);
      }
    }
    fo.outlier_count = fo.outlier_rows.size();
    fo.extreme_count = fo.extreme_rows.size();
    fo.outlier_pct = 100.0 * static_cast<double>(fo.outlier_count) / n;
    fo.extreme_pct = 100.0 * static_cast<double>(fo.extreme_count) / n;
    rep.features.push_back(std::move(fo));
  }
  return rep;
}

namespace {

struct MinorityInfo {
  int label = 0;
  std::vector<std::size_t> indices;
  std::size_t majority_count = 0;
};

MinorityInfo minority_of(const Dataset& d) {
  for (const auto& r : d.records)
    if (!r.label) throw DataError("smote: unlabelled record");
  const auto counts = d.class_counts();
  if (counts[0] == 0 || counts[1] == 0) throw DataError("smote: dataset has a single class");
  MinorityInfo info;
  // ties grow class 0
  info.label = counts[1] < counts[0] ? 1 : 0;
  info.majority_count = counts[1 - info.label];
  for (std::size_t i = 0; i < d.size(); ++i)
    if (*d.records[i].label == info.label) info.indices.push_back(i);
  return info;
}

} // namespace

std::size_t smote_synthetic_count(const Dataset& d, const SmoteConfig& cfg) {
  const auto info = minority_of(d);
  if (cfg.target == SmoteConfig::Target::balance) return info.majority_count - info.indices.size();
  return info.indices.size() * cfg.percentage / 100;
}

Dataset smote(const Dataset& d, const SmoteConfig& cfg) {
  const auto info = minority_of(d);
  const auto m = info.indices.size();
  if (cfg.k_neighbors == 0) throw ConfigError("smote: k_neighbors must be positive");
  if (cfg.k_neighbors >= m)
    throw ConfigError("smote: k_neighbors (" + std::to_string(cfg.k_neighbors) + ") must be smaller than the minority size (" +
                      std::to_string(m) + ")");
  if (cfg.target == SmoteConfig::Target::percentage && cfg.percentage == 0)
    throw ConfigError("smote: percentage must be positive");
  const auto count = smote_synthetic_count(d, cfg);

  // Distance space: numeric features standardized over d; all features if none are numeric.
  std::vector<std::size_t> dist_features;
  for (std::size_t f = 0; f < d.schema.size(); ++f)
    if (d.schema.features[f].is_numeric()) dist_features.push_back(f);
  if (dist_features.empty()) {
    dist_features.resize(d.schema.size());
    std::iota(dist_features.begin(), dist_features.end(), std::size_t{0});
  }
  std::vector<double> mu(dist_features.size()), sd(dist_features.size());
  for (std::size_t j = 0; j < dist_features.size(); ++j) {
    const auto col = d.column(dist_features[j]);
    mu[j] = mean_of(col);
    const double s = col.size() > 1 ? sample_std(col) : 0.0;
    sd[j] = s > 0 ? s : 1.0;
  }
  auto sq_distance = [&](std::size_t a, std::size_t b) {
    double acc = 0;
    for (std::size_t j = 0; j < dist_features.size(); ++j) {
      const auto f = dist_features[j];
      const double diff = (d.records[a].values[f] - d.records[b].values[f]) / sd[j];
      acc += diff * diff;
    }
    return acc;
  };

  // k nearest minority neighbors, ties to the lower record index
  std::vector<std::vector<std::size_t>> neighbors(m);
  for (std::size_t a = 0; a < m; ++a) {
    std::vector<std::pair<double, std::size_t>> cand;
    cand.reserve(m - 1);
    for (std::size_t b = 0; b < m; ++b)
      if (b != a) cand.emplace_back(sq_distance(info.indices[a], info.indices[b]), info.indices[b]);
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(cfg.k_neighbors), cand.end());
    for (std::size_t i = 0; i < cfg.k_neighbors; ++i) neighbors[a].push_back(cand[i].second);
  }

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);

  Dataset out = d;
  out.records.reserve(d.size() + count);
  for (std::size_t s = 0; s < count; ++s) {
    const auto slot = order[s % m];
    const auto parent_idx = info.indices[slot];
    const auto neighbor_idx = neighbors[slot][rng.uniform_index(cfg.k_neighbors)];
    const auto& x = d.records[parent_idx];
    const auto& nb = d.records[neighbor_idx];
    const double u = rng.uniform01();
    PatientRecord syn;
    syn.label = info.label;
    syn.origin = SyntheticOrigin{parent_idx, neighbor_idx};
    syn.out_of_range = x.out_of_range || nb.out_of_range;
    syn.values.resize(x.values.size());
    for (std::size_t f = 0; f < x.values.size(); ++f) {
      if (d.schema.features[f].is_numeric()) {
        syn.values[f] = x.values[f] + u * (nb.values[f] - x.values[f]);
      } else {
        syn.values[f] = rng.uniform01() < 0.5 ? x.values[f] : nb.values[f];
      }
    }
    out.records.push_back(std::move(syn));
  }
  const auto counts = out.class_counts();
  out.provenance += " | smote(k=" + std::to_string(cfg.k_neighbors) + ", seed=" + std::to_string(cfg.seed) +
                    ", +" + std::to_string(count) + " -> " + std::to_string(counts[0]) + "/" +
                    std::to_string(counts[1]) + ")";
  return out;
}

} // namespace cad
