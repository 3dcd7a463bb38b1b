#include <algorithm>
#include <cmath>
#include <numeric>

#include "cad/errors.hpp"
#include "cad/model.hpp"

namespace cad {

namespace {

constexpr double kMinError = 1e-10;

double alpha_for(double error) {
  const double e = std::clamp(error, kMinError, 1 - kMinError);
  return 0.5 * std::log((1 - e) / e);
}

} // namespace

TrainedModel train_adaboost(const Dataset& d, const AdaBoostParams& hp, std::optional<ScalingParams> scaling) {
  ModelSpec spec{hp};
  validate(spec);
  const auto m = make_matrix(d, scaling);
  if (m.rows == 0) throw DataError("adaboost: empty training set");
  const auto n = m.rows;
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::vector<double> weights(n, 1.0 / static_cast<double>(n));

  AdaBoostModel model;
  TrainedModel out;
  out.meta = {spec, d.size(), {}};
  TreeGrowOptions opt{TreeParams{1, hp.weak_depth, false}, 0, nullptr};

  for (std::size_t round = 0; round < hp.n_rounds; ++round) {
    // the tree works on counts, so feed weights rescaled to mean 1
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n);
    auto learner = grow_tree(m, rows, scaled, opt);

    std::vector<bool> wrong(n);
    double error = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int h = tree_p_positive(learner, m.row(i)) >= 0.5 ? 1 : 0;
      wrong[i] = h != m.y[i];
      if (wrong[i]) error += weights[i];
    }

    if (error >= 0.5) {
      if (round == 0) {
        model.learners.push_back(std::move(learner));
        model.alphas.push_back(1.0);
        model.trace.push_back({error, 1.0, 1.0});
        model.weak_warning = true;
        out.meta.warnings.push_back("adaboost: weak learner could not beat chance on round 1 (error " +
                                    std::to_string(error) + ")");
      }
      break;
    }
    const double alpha = alpha_for(error);
    model.learners.push_back(std::move(learner));
    model.alphas.push_back(alpha);
    if (error <= 0) {
      model.trace.push_back({error, alpha, 1.0});
      break;
    }
    const double up = std::exp(alpha), down = std::exp(-alpha);
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      weights[i] *= wrong[i] ? up : down;
      sum += weights[i];
    }
    double check = 0;
    for (auto& w : weights) {
      w /= sum;
      check += w;
    }
    model.trace.push_back({error, alpha, check});
  }

  out.payload = std::move(model);
  out.schema = d.schema;
  out.scaling = std::move(scaling);
  return out;
}

double adaboost_margin(const AdaBoostModel& a, std::span<const double> x) {
  double margin = 0;
  for (std::size_t t = 0; t < a.learners.size(); ++t)
    margin += a.alphas[t] * (tree_p_positive(a.learners[t], x) >= 0.5 ? 1.0 : -1.0);
  return margin;
}

} // namespace cad
