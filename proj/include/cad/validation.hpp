#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cad/dataset.hpp"
#include "cad/hyperparams.hpp"
#include "cad/metrics.hpp"
#include "cad/model.hpp"
#include "cad/preprocess.hpp"

namespace cad {

struct FoldPlan {
  std::size_t k = 0;
  /// Record index -> fold id.
  std::vector<std::size_t> assignment;
  std::uint64_t seed = 0;

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

/// Seeded shuffle within each class, classes concatenated (label 0 first),
/// then round-robin fold assignment. Fold sizes and per-fold class counts
/// differ by at most one. Requires 2 <= k <= record count.
FoldPlan stratified_folds(const Dataset& d, std::size_t k, std::uint64_t seed);

enum class PipelineMode {
  /// Standardizer, SMOTE and feature selection fitted inside each training fold.
  per_fold,
  /// SMOTE, selection and standardizer applied once to the whole dataset before CV.
  paper,
};

std::string_view to_string(PipelineMode mode);
PipelineMode pipeline_mode_from_string(std::string_view text);

struct GridAxis {
  /// Dotted path into the spec's params object, e.g. "learning_rate" or "tree.min_leaf".
  std::string param;
  std::vector<nlohmann::json> values;
};
using Grid = std::vector<GridAxis>;

struct Tuning {
  Grid grid;
  std::size_t inner_k = 3;
};

struct Pipeline {
  /// Display name (report.csv model column).
  std::string name;
  /// File-name slug (roc_<id>.csv).
  std::string id;
  PipelineMode mode = PipelineMode::per_fold;
  bool smote = true;
  SmoteConfig smote_config;
  /// 0 disables feature selection.
  std::size_t selection_k = 12;
  std::size_t selection_bins = 10;
  ModelSpec model;
  std::optional<Tuning> tuning;
  /// Voting only: independent tuning per member (index-aligned with members).
  std::vector<std::optional<Tuning>> member_tuning;
};

struct HeldOutPrediction {
  std::size_t record = 0;
  std::size_t fold = 0;
  int truth = 0;
  int predicted = 0;
  double p_positive = 0;
};

struct CvResult {
  MetricsReport metrics;
  std::vector<HeldOutPrediction> predictions;
  /// Spec actually trained in each fold (after tuning).
  std::vector<ModelSpec> fold_specs;
  /// Features used in each fold (after selection).
  std::vector<std::vector<std::string>> fold_features;
};

/// Pools held-out predictions of every fold into one report. In per_fold
/// mode the standardizer, SMOTE and selection are fitted on each training
/// portion. In paper mode, d must already be balanced (see balance_for_paper_mode)
/// and selection/standardization are fitted once on all of d.
CvResult cross_validate(const Dataset& d, const Pipeline& pipeline, const FoldPlan& plan);

/// SMOTE applied to the whole dataset when the pipeline asks for it.
Dataset balance_for_paper_mode(const Dataset& d, const Pipeline& pipeline);

/// Balances (paper mode), plans k folds with `seed`, and cross-validates.
CvResult evaluate_pipeline(const Dataset& d, const Pipeline& pipeline, std::size_t k, std::uint64_t seed);

/// Final training on all of d in pipeline order: standardizer (fitted before
/// balancing), SMOTE, selection, tuning, training. Selected features keep
/// their schema order.
TrainedModel fit_pipeline(const Dataset& d, const Pipeline& pipeline, std::uint64_t seed);

struct GridCell {
  nlohmann::json params;
  std::optional<double> accuracy;
  std::string error;
};

struct GridResult {
  ModelSpec best;
  std::size_t best_index = 0;
  std::vector<GridCell> table;
};

/// Applies one grid cell to a spec. Throws ConfigError on unknown paths.
ModelSpec apply_grid_cell(const ModelSpec& base, const nlohmann::json& cell);

/// Cartesian product of the axes (first axis varies slowest).
std::vector<nlohmann::json> grid_cells(const Grid& grid);

/// Exhaustive grid evaluation by inner stratified CV accuracy on d (the
/// caller's training data). Ties keep the earlier cell; failing cells are
/// recorded and skipped. Throws ConfigError if the grid is empty or every cell fails.
GridResult grid_search(const Dataset& d, const ModelSpec& base, const Grid& grid, std::size_t inner_k,
                       std::uint64_t seed);

struct BenchmarkRow {
  std::string name;
  std::string id;
  std::optional<CvResult> result;
  std::string error;
};

/// One row per pipeline, sorted by accuracy descending (failed rows last,
/// stable otherwise). Throws ConfigError on an empty pipeline list.
std::vector<BenchmarkRow> benchmark_report(const Dataset& d, const std::vector<Pipeline>& pipelines, std::size_t k,
                                           std::uint64_t seed);

/// The seven standard comparison pipelines (Ensemble 1, MLP, RF, AdaBoost, J48,
/// NaiveBayes, KNN). With `tuned`, MLP/RF/AdaBoost/KNN/J48 carry grids and the
/// ensemble tunes each member the same way.
std::vector<Pipeline> standard_pipelines(PipelineMode mode, std::uint64_t seed, bool tuned, std::size_t selection_k = 12);

Grid default_grid(ModelKind kind);

} // namespace cad
