#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace cad {

enum class ModelKind { tree, forest, adaboost, mlp, naive_bayes, knn, voting };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view text);

struct TreeParams {
  std::size_t min_leaf = 2;
  /// Empty = unlimited.
  std::optional<std::size_t> max_depth;
  bool prune = true;
};

struct ForestParams {
  std::size_t n_trees = 100;
  /// 0 = floor(sqrt(feature count)).
  std::size_t features_per_split = 0;
  bool bootstrap = true;
  std::uint64_t seed = 1;
  TreeParams tree{1, std::nullopt, false};
};

struct AdaBoostParams {
  std::size_t n_rounds = 50;
  std::size_t weak_depth = 1;
  std::uint64_t seed = 1;
};

struct MlpParams {
  /// Empty optional = one hidden layer of ceil((features + 2) / 2) units.
  /// An empty vector means no hidden layer.
  std::optional<std::vector<std::size_t>> hidden_layers;
  double learning_rate = 0.3;
  double momentum = 0.2;
  std::size_t epochs = 500;
  std::uint64_t seed = 1;
};

struct NaiveBayesParams {};

struct KnnParams {
  std::size_t k = 1;
};

struct TieBreak {
  enum class Mode { confidence, fixed_label };
  Mode mode = Mode::confidence;
  int fixed_label = 1;
};

struct ModelSpec;

struct VotingParams {
  std::vector<ModelSpec> members;
  TieBreak tie_break;
  std::uint64_t seed = 1;
};

using Hyperparams =
    std::variant<TreeParams, ForestParams, AdaBoostParams, MlpParams, NaiveBayesParams, KnnParams, VotingParams>;

struct ModelSpec {
  Hyperparams params;
  ModelKind kind() const { return static_cast<ModelKind>(params.index()); }
};

/// Default hyperparameters for a kind. voting defaults to MLP + forest + AdaBoost.
ModelSpec default_spec(ModelKind kind);

/// Throws ConfigError on invalid values (even k for KNN, momentum outside [0,1), ...).
void validate(const ModelSpec& spec);

/// Copy of spec with its seed replaced. Voting members get sub-seeds derived
/// from the ensemble seed at training time.
ModelSpec with_seed(const ModelSpec& spec, std::uint64_t seed);
std::optional<std::uint64_t> seed_of(const ModelSpec& spec);

nlohmann::json to_json(const ModelSpec& spec);
/// Accepts {"kind": ..., "params": {...}}; missing params take defaults.
ModelSpec spec_from_json(const nlohmann::json& j);

} // namespace cad
