#include <cmath>
#include <numeric>

#include "cad/errors.hpp"
#include "cad/model.hpp"
#include "cad/rng.hpp"

namespace cad {

TrainedModel train_forest(const Dataset& d, const ForestParams& hp, std::optional<ScalingParams> scaling) {
  ModelSpec spec{hp};
  validate(spec);
  const auto m = make_matrix(d, scaling);
  if (m.rows == 0) throw DataError("forest: empty training set");
  if (hp.features_per_split > m.cols)
    throw ConfigError("forest: features_per_split (" + std::to_string(hp.features_per_split) +
                      ") exceeds feature count (" + std::to_string(m.cols) + ")");
  const std::size_t mtry = hp.features_per_split > 0
                               ? hp.features_per_split
                               : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(m.cols)))));

  ForestModel forest;
  forest.trees.reserve(hp.n_trees);
  for (std::size_t t = 0; t < hp.n_trees; ++t) {
    // each tree owns a seed stream indexed by its position
    Rng rng(derive_seed(hp.seed, t));
    std::vector<std::size_t> rows(m.rows);
    if (hp.bootstrap) {
      for (auto& r : rows) r = rng.uniform_index(m.rows);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    std::vector<double> w(rows.size(), 1.0);
    TreeGrowOptions opt{hp.tree, mtry, &rng};
    forest.trees.push_back(grow_tree(m, rows, w, opt));
  }
  return TrainedModel{std::move(forest), d.schema, std::move(scaling), {spec, d.size(), {}}};
}

double forest_p_positive(const ForestModel& f, std::span<const double> x) {
  double sum = 0;
  for (const auto& t : f.trees) sum += tree_p_positive(t, x);
  return sum / static_cast<double>(f.trees.size());
}

} // namespace cad
