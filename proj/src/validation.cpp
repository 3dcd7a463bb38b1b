#include "cad/validation.hpp"

#include <algorithm>
#include <numeric>

#include "cad/errors.hpp"
#include "cad/feature_selection.hpp"
#include "cad/model.hpp"
#include "cad/rng.hpp"

namespace cad {

using nlohmann::json;

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] != fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (auto f : assignment) ++sizes[f];
  return sizes;
}

FoldPlan stratified_folds(const Dataset& d, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("stratified_folds: k must be >= 2 (got " + std::to_string(k) + ")");
  if (k > d.size())
    throw ConfigError("stratified_folds: k (" + std::to_string(k) + ") exceeds record count (" +
                      std::to_string(d.size()) + ")");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& lab = d.records[i].label;
    if (!lab) throw DataError("stratified_folds: unlabelled record " + std::to_string(i));
    by_class[*lab == 1 ? 1 : 0].push_back(i);
  }
  Rng rng(seed);
  std::vector<std::size_t> order;
  for (auto& cls : by_class) {
    rng.shuffle(cls);
    order.insert(order.end(), cls.begin(), cls.end());
  }
  FoldPlan plan{k, std::vector<std::size_t>(d.size()), seed};
  for (std::size_t pos = 0; pos < order.size(); ++pos) plan.assignment[order[pos]] = pos % k;
  return plan;
}

std::string_view to_string(PipelineMode mode) { return mode == PipelineMode::paper ? "paper" : "default"; }

PipelineMode pipeline_mode_from_string(std::string_view text) {
  if (text == "paper") return PipelineMode::paper;
  if (text == "default" || text == "per_fold") return PipelineMode::per_fold;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected default or paper)");
}

namespace {

ScalingParams restrict_scaling(const ScalingParams& p, const FeatureSchema& schema) {
  ScalingParams out;
  for (const auto& f : p.features)
    if (schema.index_of(f.name)) out.features.push_back(f);
  return out;
}

ModelSpec resolve_spec(const Dataset& train, const Pipeline& p, std::uint64_t seed) {
  ModelSpec spec = p.model;
  if (auto* voting = std::get_if<VotingParams>(&spec.params); voting && !p.member_tuning.empty()) {
    if (p.member_tuning.size() != voting->members.size())
      throw ConfigError("pipeline '" + p.name + "': member_tuning does not match member count");
    for (std::size_t i = 0; i < voting->members.size(); ++i) {
      const auto& t = p.member_tuning[i];
      if (!t) continue;
      // tune with the seed the member will actually train with
      auto member = with_seed(voting->members[i], derive_seed(voting->seed, i));
      voting->members[i] = grid_search(train, member, t->grid, t->inner_k, derive_seed(seed, 1000 + i)).best;
    }
    return spec;
  }
  if (p.tuning) return grid_search(train, spec, p.tuning->grid, p.tuning->inner_k, seed).best;
  return spec;
}

template <typename Fn> auto with_fold_context(std::size_t fold, Fn&& fn) {
  const std::string where = "fold " + std::to_string(fold) + ": ";
  try {
    return fn();
  } catch (const DataError& e) {
    throw DataError(where + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(where + e.what());
  } catch (const TrainingError& e) {
    throw TrainingError(where + e.what());
  }
}

void predict_fold(const TrainedModel& model, const Dataset& test, const std::vector<std::size_t>& test_idx,
                  std::size_t fold, CvResult& out) {
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto& rec = test.records[i];
    const auto pred = predict(model, rec);
    out.predictions.push_back({test_idx[i], fold, *rec.label, pred.label, pred.p_positive});
  }
}

void finish(CvResult& out) {
  std::sort(out.predictions.begin(), out.predictions.end(),
            [](const auto& a, const auto& b) { return a.record < b.record; });
  std::vector<LabelPair> pairs;
  std::vector<ScoredLabel> scored;
  for (const auto& p : out.predictions) {
    pairs.push_back({p.truth, p.predicted});
    scored.push_back({p.truth, p.p_positive});
  }
  out.metrics = compute_metrics(confusion(pairs), scored);
}

} // namespace

CvResult cross_validate(const Dataset& d, const Pipeline& pipeline, const FoldPlan& plan) {
  if (plan.assignment.size() != d.size()) throw ConfigError("cross_validate: fold plan does not match dataset size");
  validate(pipeline.model);
  CvResult out;

  if (pipeline.mode == PipelineMode::paper) {
    const auto scaling = fit_standardizer(d);
    Dataset data = d;
    if (pipeline.selection_k > 0) {
      const auto ranking = rank_and_select(d, std::min(pipeline.selection_k, d.schema.size()), pipeline.selection_bins);
      data = d.project(ranking.selected.names());
    }
    const auto scaled = restrict_scaling(scaling, data.schema);
    const auto spec = resolve_spec(data, pipeline, derive_seed(plan.seed, 7));
    for (std::size_t t = 0; t < plan.k; ++t) {
      with_fold_context(t, [&] {
        const auto train_idx = plan.train_indices(t), test_idx = plan.test_indices(t);
        const auto model = train_model(data.subset(train_idx), spec, scaled);
        predict_fold(model, data.subset(test_idx), test_idx, t, out);
        out.fold_specs.push_back(spec);
        out.fold_features.push_back(data.schema.names());
        return 0;
      });
    }
    finish(out);
    return out;
  }

  for (std::size_t t = 0; t < plan.k; ++t) {
    with_fold_context(t, [&] {
      const auto train_idx = plan.train_indices(t), test_idx = plan.test_indices(t);
      Dataset train = d.subset(train_idx);
      Dataset test = d.subset(test_idx);
      const auto scaling = fit_standardizer(train);
      if (pipeline.smote) {
        auto cfg = pipeline.smote_config;
        cfg.seed = derive_seed(cfg.seed, t);
        train = smote(train, cfg);
      }
      if (pipeline.selection_k > 0) {
        const auto ranking =
            rank_and_select(train, std::min(pipeline.selection_k, train.schema.size()), pipeline.selection_bins);
        const auto names = ranking.selected.names();
        train = train.project(names);
        test = test.project(names);
      }
      const auto spec = resolve_spec(train, pipeline, derive_seed(plan.seed, 100 + t));
      const auto model = train_model(train, spec, restrict_scaling(scaling, train.schema));
      predict_fold(model, test, test_idx, t, out);
      out.fold_specs.push_back(spec);
      out.fold_features.push_back(train.schema.names());
      return 0;
    });
  }
  finish(out);
  return out;
}

Dataset balance_for_paper_mode(const Dataset& d, const Pipeline& pipeline) {
  if (!pipeline.smote) return d;
  return smote(d, pipeline.smote_config);
}

CvResult evaluate_pipeline(const Dataset& d, const Pipeline& pipeline, std::size_t k, std::uint64_t seed) {
  if (pipeline.mode == PipelineMode::paper) {
    const auto balanced = balance_for_paper_mode(d, pipeline);
    return cross_validate(balanced, pipeline, stratified_folds(balanced, k, seed));
  }
  return cross_validate(d, pipeline, stratified_folds(d, k, seed));
}

TrainedModel fit_pipeline(const Dataset& d, const Pipeline& pipeline, std::uint64_t seed) {
  validate(pipeline.model);
  const auto scaling = fit_standardizer(d);
  Dataset train = pipeline.smote ? smote(d, pipeline.smote_config) : d;
  if (pipeline.selection_k > 0) {
    const auto ranking =
        rank_and_select(train, std::min(pipeline.selection_k, train.schema.size()), pipeline.selection_bins);
    std::vector<std::string> names;
    for (const auto& f : d.schema.features)
      if (ranking.selected.index_of(f.name)) names.push_back(f.name);
    train = train.project(names);
  }
  const auto spec = resolve_spec(train, pipeline, derive_seed(seed, 7));
  return train_model(train, spec, restrict_scaling(scaling, train.schema));
}

std::vector<json> grid_cells(const Grid& grid) {
  std::vector<json> cells{json::object()};
  for (const auto& axis : grid) {
    if (axis.values.empty()) throw ConfigError("grid axis '" + axis.param + "' has no values");
    std::vector<json> next;
    for (const auto& cell : cells)
      for (const auto& v : axis.values) {
        json c = cell;
        c[axis.param] = v;
        next.push_back(std::move(c));
      }
    cells = std::move(next);
  }
  return cells;
}

ModelSpec apply_grid_cell(const ModelSpec& base, const json& cell) {
  json j = to_json(base);
  for (const auto& [path, value] : cell.items()) {
    std::string pointer = "/params/" + path;
    std::replace(pointer.begin(), pointer.end(), '.', '/');
    const json::json_pointer ptr(pointer);
    if (!j.contains(ptr)) throw ConfigError("grid: unknown parameter '" + path + "' for " + std::string(to_string(base.kind())));
    j[ptr] = value;
  }
  auto spec = spec_from_json(j);
  validate(spec);
  return spec;
}

GridResult grid_search(const Dataset& d, const ModelSpec& base, const Grid& grid, std::size_t inner_k,
                       std::uint64_t seed) {
  if (grid.empty()) throw ConfigError("grid_search: empty grid");
  const auto cells = grid_cells(grid);
  const auto plan = stratified_folds(d, inner_k, seed);
  GridResult result{base, 0, {}};
  std::optional<double> best;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    GridCell cell{cells[c], std::nullopt, {}};
    try {
      const auto spec = apply_grid_cell(base, cells[c]);
      std::size_t correct = 0;
      for (std::size_t t = 0; t < plan.k; ++t) {
        const Dataset train = d.subset(plan.train_indices(t));
        const Dataset test = d.subset(plan.test_indices(t));
        const auto model = train_model(train, spec, fit_standardizer(train));
        for (const auto& rec : test.records) correct += predict(model, rec).label == *rec.label ? 1 : 0;
      }
      cell.accuracy = static_cast<double>(correct) / static_cast<double>(d.size());
      if (!best || *cell.accuracy > *best) {
        best = cell.accuracy;
        result.best = spec;
        result.best_index = c;
      }
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    result.table.push_back(std::move(cell));
  }
  if (!best) throw ConfigError("grid_search: every grid cell failed (first error: " + result.table.front().error + ")");
  return result;
}

std::vector<BenchmarkRow> benchmark_report(const Dataset& d, const std::vector<Pipeline>& pipelines, std::size_t k,
                                           std::uint64_t seed) {
  if (pipelines.empty()) throw ConfigError("benchmark: no pipelines");
  std::vector<BenchmarkRow> rows;
  for (const auto& p : pipelines) {
    BenchmarkRow row{p.name, p.id, std::nullopt, {}};
    try {
      row.result = evaluate_pipeline(d, p, k, seed);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const BenchmarkRow& a, const BenchmarkRow& b) {
    const auto acc = [](const BenchmarkRow& r) {
      return r.result && r.result->metrics.accuracy ? *r.result->metrics.accuracy : -1.0;
    };
    return acc(a) > acc(b);
  });
  return rows;
}

Grid default_grid(ModelKind kind) {
  switch (kind) {
  case ModelKind::mlp: return {{"learning_rate", {0.1, 0.3, 1.0}}, {"momentum", {0.2, 0.5}}};
  case ModelKind::forest: return {{"features_per_split", {2, 3, 4, 6}}};
  case ModelKind::adaboost: return {{"n_rounds", {10, 50, 100}}, {"weak_depth", {1, 2}}};
  case ModelKind::knn: return {{"k", {1, 3, 5, 7, 9, 11, 13, 15, 17, 19, 21}}};
  case ModelKind::tree: return {{"min_leaf", {2, 5, 10}}};
  case ModelKind::naive_bayes:
  case ModelKind::voting: return {};
  }
  return {};
}

std::vector<Pipeline> standard_pipelines(PipelineMode mode, std::uint64_t seed, bool tuned, std::size_t selection_k) {
  auto make = [&](std::string name, std::string id, ModelKind kind) {
    Pipeline p;
    p.name = std::move(name);
    p.id = std::move(id);
    p.mode = mode;
    p.smote_config.seed = seed;
    p.selection_k = selection_k;
    p.model = with_seed(default_spec(kind), seed);
    if (tuned) {
      auto grid = default_grid(kind);
      if (!grid.empty()) p.tuning = Tuning{std::move(grid), 3};
    }
    return p;
  };
  std::vector<Pipeline> out;
  auto ensemble = make("Ensemble1(MLP+RF+AdaBoost)", "ensemble1", ModelKind::voting);
  if (tuned) {
    for (auto kind : {ModelKind::mlp, ModelKind::forest, ModelKind::adaboost})
      ensemble.member_tuning.push_back(Tuning{default_grid(kind), 3});
  }
  out.push_back(std::move(ensemble));
  out.push_back(make("MultilayerPerceptron", "mlp", ModelKind::mlp));
  out.push_back(make("RandomForest", "rf", ModelKind::forest));
  out.push_back(make("AdaBoost", "adaboost", ModelKind::adaboost));
  out.push_back(make("J48", "j48", ModelKind::tree));
  out.push_back(make("NaiveBayes", "nb", ModelKind::naive_bayes));
  out.push_back(make("KNN", "knn", ModelKind::knn));
  return out;
}

} // namespace cad
