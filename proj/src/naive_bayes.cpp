#include <cmath>
#include <numbers>

#include "cad/errors.hpp"
#include "cad/model.hpp"

namespace cad {

namespace {
constexpr double kVarianceFloor = 1e-9;
}

TrainedModel train_naive_bayes(const Dataset& d, const NaiveBayesParams& hp, std::optional<ScalingParams> scaling) {
  ModelSpec spec{hp};
  const auto m = make_matrix(d, scaling);
  std::array<double, 2> n_class{0, 0};
  for (int y : m.y) n_class[y] += 1;
  if (n_class[0] == 0 || n_class[1] == 0) throw DataError("naive_bayes: both classes must be present");

  NaiveBayesModel nb;
  const double n = static_cast<double>(m.rows);
  nb.priors = {n_class[0] / n, n_class[1] / n};
  for (std::size_t j = 0; j < m.cols; ++j) {
    if (m.kinds[j] == FeatureKind::numeric) {
      NaiveBayesModel::Gaussian g;
      std::array<double, 2> sum{0, 0}, sq{0, 0};
      for (std::size_t i = 0; i < m.rows; ++i) sum[m.y[i]] += m.at(i, j);
      for (int c : {0, 1}) g.mean[c] = sum[c] / n_class[c];
      for (std::size_t i = 0; i < m.rows; ++i) {
        const double dv = m.at(i, j) - g.mean[m.y[i]];
        sq[m.y[i]] += dv * dv;
      }
      for (int c : {0, 1}) g.var[c] = std::max(sq[c] / n_class[c], kVarianceFloor);
      nb.features.emplace_back(g);
    } else {
      NaiveBayesModel::Frequencies fr;
      for (std::size_t i = 0; i < m.rows; ++i) fr.counts[m.at(i, j)][m.y[i]] += 1;
      fr.totals = n_class;
      fr.vocabulary = static_cast<double>(fr.counts.size()) + 1;
      nb.features.emplace_back(std::move(fr));
    }
  }
  return TrainedModel{std::move(nb), d.schema, std::move(scaling), {spec, d.size(), {}}};
}

double naive_bayes_p_positive(const NaiveBayesModel& nb, std::span<const double> x) {
  std::array<double, 2> log_post{std::log(nb.priors[0]), std::log(nb.priors[1])};
  for (std::size_t j = 0; j < nb.features.size(); ++j) {
    const double v = x[j];
    if (const auto* g = std::get_if<NaiveBayesModel::Gaussian>(&nb.features[j])) {
      for (int c : {0, 1}) {
        const double dv = v - g->mean[c];
        log_post[c] += -0.5 * std::log(2 * std::numbers::pi * g->var[c]) - dv * dv / (2 * g->var[c]);
      }
    } else {
      const auto& fr = std::get<NaiveBayesModel::Frequencies>(nb.features[j]);
      auto it = fr.counts.find(v);
      for (int c : {0, 1}) {
        const double count = it == fr.counts.end() ? 0.0 : it->second[c];
        log_post[c] += std::log((count + 1) / (fr.totals[c] + fr.vocabulary));
      }
    }
  }
  return 1.0 / (1.0 + std::exp(log_post[0] - log_post[1]));
}

} // namespace cad
