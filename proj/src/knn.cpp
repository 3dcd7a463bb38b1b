#include <algorithm>
#include <numeric>

#include "cad/errors.hpp"
#include "cad/model.hpp"

namespace cad {

TrainedModel train_knn(const Dataset& d, const KnnParams& hp, std::optional<ScalingParams> scaling) {
  ModelSpec spec{hp};
  validate(spec);
  if (hp.k > d.size())
    throw ConfigError("knn: k (" + std::to_string(hp.k) + ") exceeds record count (" + std::to_string(d.size()) + ")");
  if (!scaling) scaling = fit_standardizer(d);
  auto m = make_matrix(d, scaling);
  KnnModel knn{hp.k, m.cols, std::move(m.x), std::move(m.y)};
  return TrainedModel{std::move(knn), d.schema, std::move(scaling), {spec, d.size(), {}}};
}

double knn_p_positive(const KnnModel& knn, std::span<const double> x) {
  const auto n = knn.y.size();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0;
    for (std::size_t j = 0; j < knn.cols; ++j) {
      const double diff = knn.x[i * knn.cols + j] - x[j];
      acc += diff * diff;
    }
    dist[i] = {acc, i};
  }
  // pair ordering breaks distance ties by lower record index
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(knn.k), dist.end());
  std::size_t positives = 0;
  for (std::size_t i = 0; i < knn.k; ++i) positives += knn.y[dist[i].second] == 1 ? 1 : 0;
  return static_cast<double>(positives) / static_cast<double>(knn.k);
}

} // namespace cad
