#include "cad/model.hpp"

#include <cmath>

#include "cad/ensemble.hpp"
#include "cad/errors.hpp"
#include "cad/mlp.hpp"

namespace cad {

TrainMatrix make_matrix(const Dataset& d, const std::optional<ScalingParams>& scaling) {
  TrainMatrix m;
  m.rows = d.size();
  m.cols = d.schema.size();
  m.x.reserve(m.rows * m.cols);
  m.y.reserve(m.rows);
  for (const auto& f : d.schema.features) m.kinds.push_back(f.kind);
  for (const auto& r : d.records) {
    if (!r.label) throw DataError("training data contains an unlabelled record");
    if (r.values.size() != m.cols) throw DataError("record width does not match schema");
    if (scaling) {
      const auto v = scaling->apply(d.schema, r.values);
      m.x.insert(m.x.end(), v.begin(), v.end());
    } else {
      m.x.insert(m.x.end(), r.values.begin(), r.values.end());
    }
    m.y.push_back(*r.label == 1 ? 1 : 0);
  }
  return m;
}

std::vector<double> to_model_space(const TrainedModel& model, std::span<const double> raw) {
  if (model.scaling) return model.scaling->apply(model.schema, raw);
  return {raw.begin(), raw.end()};
}

Prediction predict_scaled(const TrainedModel& model, std::span<const double> x) {
  auto from_p = [](double p) { return Prediction{p >= 0.5 ? 1 : 0, p}; };
  return std::visit(
      [&](const auto& payload) -> Prediction {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, TreeModel>) {
          return from_p(tree_p_positive(payload, x));
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          return from_p(forest_p_positive(payload, x));
        } else if constexpr (std::is_same_v<T, AdaBoostModel>) {
          return from_p(1.0 / (1.0 + std::exp(-2.0 * adaboost_margin(payload, x))));
        } else if constexpr (std::is_same_v<T, MlpModel>) {
          return from_p(mlp_output(payload, x));
        } else if constexpr (std::is_same_v<T, NaiveBayesModel>) {
          return from_p(naive_bayes_p_positive(payload, x));
        } else if constexpr (std::is_same_v<T, KnnModel>) {
          return from_p(knn_p_positive(payload, x));
        } else {
          const auto r = vote_scaled(model, x);
          return Prediction{r.label, r.p_positive};
        }
      },
      model.payload);
}

Prediction predict(const TrainedModel& model, const PatientRecord& record) {
  validate_record(model.schema, record);
  return predict_scaled(model, to_model_space(model, record.values));
}

TrainedModel train_model(const Dataset& d, const ModelSpec& spec, std::optional<ScalingParams> scaling) {
  return std::visit(
      [&](const auto& hp) -> TrainedModel {
        using T = std::decay_t<decltype(hp)>;
        if constexpr (std::is_same_v<T, TreeParams>) return train_tree(d, hp, std::move(scaling));
        else if constexpr (std::is_same_v<T, ForestParams>) return train_forest(d, hp, std::move(scaling));
        else if constexpr (std::is_same_v<T, AdaBoostParams>) return train_adaboost(d, hp, std::move(scaling));
        else if constexpr (std::is_same_v<T, MlpParams>) return train_mlp(d, hp, std::move(scaling));
        else if constexpr (std::is_same_v<T, NaiveBayesParams>) return train_naive_bayes(d, hp, std::move(scaling));
        else if constexpr (std::is_same_v<T, KnnParams>) return train_knn(d, hp, std::move(scaling));
        else return train_voting(d, hp, std::move(scaling));
      },
      spec.params);
}

} // namespace cad
