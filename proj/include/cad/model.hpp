#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cad/dataset.hpp"
#include "cad/hyperparams.hpp"
#include "cad/preprocess.hpp"

namespace cad {

class Rng;

/// Dense row-major design matrix in model input space (scaling applied).
struct TrainMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> x;
  std::vector<int> y;
  std::vector<FeatureKind> kinds;

  std::span<const double> row(std::size_t i) const { return {x.data() + i * cols, cols}; }
  double at(std::size_t i, std::size_t j) const { return x[i * cols + j]; }
};

/// Throws DataError on unlabelled records.
TrainMatrix make_matrix(const Dataset& d, const std::optional<ScalingParams>& scaling);

// ---- payloads -------------------------------------------------------------

struct TreeNode {
  /// -1 for leaves.
  int feature = -1;
  bool numeric_split = true;
  /// Numeric split: left child is value <= threshold.
  double threshold = 0;
  /// Categorical split: branch values, parallel to children.
  std::vector<double> branch_values;
  std::vector<int> children;
  /// Laplace-smoothed P(label = 1) at this node.
  double p_positive = 0.5;
  /// Training weight reaching the node, and the part of it with label 1.
  double weight = 0;
  double weight_positive = 0;
};

struct TreeModel {
  std::vector<TreeNode> nodes;
  std::size_t leaf_count() const;
  std::size_t depth() const;
};

struct ForestModel {
  std::vector<TreeModel> trees;
};

struct AdaBoostRound {
  double error = 0;
  double alpha = 0;
  /// Sum of the instance weights after renormalization.
  double weight_sum = 0;
};

struct AdaBoostModel {
  std::vector<TreeModel> learners;
  std::vector<double> alphas;
  std::vector<AdaBoostRound> trace;
  /// Set when round 1 could not beat chance.
  bool weak_warning = false;
};

struct MlpModel {
  /// Input, hidden..., output (always 1).
  std::vector<std::size_t> layer_sizes;
  /// Per layer, out x (in + 1) row-major; the last column is the bias.
  std::vector<std::vector<double>> weights;
  double final_loss = 0;
  /// Loss rose by more than 1e-6 in some epoch.
  bool non_monotone = false;
  std::optional<std::size_t> first_increase_epoch;
};

struct NaiveBayesModel {
  std::array<double, 2> priors{0.5, 0.5};
  struct Gaussian {
    std::array<double, 2> mean{0, 0};
    std::array<double, 2> var{1, 1};
  };
  struct Frequencies {
    std::map<double, std::array<double, 2>> counts;
    std::array<double, 2> totals{0, 0};
    /// Distinct training values + 1 (reserved for unseen values).
    double vocabulary = 1;
  };
  std::vector<std::variant<Gaussian, Frequencies>> features;
};

struct KnnModel {
  std::size_t k = 1;
  std::size_t cols = 0;
  std::vector<double> x;
  std::vector<int> y;
};

struct TrainedModel;

struct VotingModel {
  std::vector<TrainedModel> members;
  TieBreak tie_break;
};

using ModelPayload =
    std::variant<TreeModel, ForestModel, AdaBoostModel, MlpModel, NaiveBayesModel, KnnModel, VotingModel>;

struct TrainingMeta {
  ModelSpec spec;
  std::size_t train_size = 0;
  std::vector<std::string> warnings;
};

struct TrainedModel {
  ModelPayload payload;
  /// Feature list, in input order; ranges are enforced at predict time.
  FeatureSchema schema;
  std::optional<ScalingParams> scaling;
  TrainingMeta meta;

  ModelKind kind() const { return static_cast<ModelKind>(payload.index()); }
};

struct Prediction {
  int label = 0;
  double p_positive = 0.5;
  bool operator==(const Prediction&) const = default;
};

// ---- training -------------------------------------------------------------

/// Tree growth on a subset of matrix rows with per-row weights.
struct TreeGrowOptions {
  TreeParams params;
  /// 0 = all features considered at every node.
  std::size_t features_per_split = 0;
  Rng* rng = nullptr;
};
TreeModel grow_tree(const TrainMatrix& m, std::span<const std::size_t> rows, std::span<const double> weights,
                    const TreeGrowOptions& options);
double tree_p_positive(const TreeModel& tree, std::span<const double> x);

TrainedModel train_tree(const Dataset& d, const TreeParams& hp, std::optional<ScalingParams> scaling = std::nullopt);
TrainedModel train_forest(const Dataset& d, const ForestParams& hp, std::optional<ScalingParams> scaling = std::nullopt);
TrainedModel train_adaboost(const Dataset& d, const AdaBoostParams& hp,
                            std::optional<ScalingParams> scaling = std::nullopt);
/// Fits a standardizer on d when none is supplied.
TrainedModel train_mlp(const Dataset& d, const MlpParams& hp, std::optional<ScalingParams> scaling = std::nullopt);
TrainedModel train_naive_bayes(const Dataset& d, const NaiveBayesParams& hp,
                               std::optional<ScalingParams> scaling = std::nullopt);
/// Fits a standardizer on d when none is supplied.
TrainedModel train_knn(const Dataset& d, const KnnParams& hp, std::optional<ScalingParams> scaling = std::nullopt);

/// Dispatches on spec.kind(). voting delegates to train_voting.
TrainedModel train_model(const Dataset& d, const ModelSpec& spec, std::optional<ScalingParams> scaling = std::nullopt);

// ---- prediction -----------------------------------------------------------

/// Validates the record against model.schema (presence, ranges unless the
/// record is flagged), applies scaling and predicts. label = 1 iff
/// p_positive >= 0.5, except for voting models where hard votes decide.
Prediction predict(const TrainedModel& model, const PatientRecord& record);

/// Prediction on values already in model input space; skips validation.
Prediction predict_scaled(const TrainedModel& model, std::span<const double> x);

std::vector<double> to_model_space(const TrainedModel& model, std::span<const double> raw);

double forest_p_positive(const ForestModel& f, std::span<const double> x);
double adaboost_margin(const AdaBoostModel& a, std::span<const double> x);
double naive_bayes_p_positive(const NaiveBayesModel& nb, std::span<const double> x);
double knn_p_positive(const KnnModel& knn, std::span<const double> x);

} // namespace cad
