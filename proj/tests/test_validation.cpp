#include <doctest.h>

#include <algorithm>
#include <set>

#include "cad/errors.hpp"
#include "cad/fixture.hpp"
#include "cad/validation.hpp"
#include "helpers.hpp"

using namespace cad;
using cad::testing::table;

namespace {

Dataset skewed(std::size_t positives, std::size_t negatives) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < positives + negatives; ++i) {
    const int y = i < positives ? 1 : 0;
    rows.push_back({double(i % 17) + y, double(i % 5)});
    labels.push_back(y);
  }
  return table(rows, labels);
}

Pipeline plain(ModelSpec spec) {
  Pipeline p;
  p.name = "plain";
  p.id = "plain";
  p.smote = false;
  p.selection_k = 0;
  p.model = std::move(spec);
  return p;
}

ModelSpec knn(std::size_t k) { return ModelSpec{KnnParams{k}}; }

} // namespace

TEST_CASE("303 records into 10 stratified folds") {
  const auto d = skewed(216, 87);
  const auto plan = stratified_folds(d, 10, 42);
  auto sizes = plan.fold_sizes();
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{30, 30, 30, 30, 30, 30, 30, 31, 31, 31});
  std::vector<std::size_t> seen;
  for (std::size_t f = 0; f < 10; ++f)
    for (auto i : plan.test_indices(f)) seen.push_back(i);
  std::sort(seen.begin(), seen.end());
  for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == i);
}

TEST_CASE("per-fold class counts differ by at most one over 1000 seeded plans") {
  const auto d = skewed(216, 87);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto plan = stratified_folds(d, 10, seed);
    std::vector<std::size_t> pos(10, 0), neg(10, 0);
    for (std::size_t i = 0; i < d.size(); ++i) (*d.records[i].label ? pos : neg)[plan.assignment[i]]++;
    const auto [pmin, pmax] = std::minmax_element(pos.begin(), pos.end());
    const auto [nmin, nmax] = std::minmax_element(neg.begin(), neg.end());
    REQUIRE(*pmax - *pmin <= 1);
    REQUIRE(*nmax - *nmin <= 1);
  }
}

TEST_CASE("fold plans: determinism, leave-one-out, bad k") {
  const auto d = skewed(12, 6);
  CHECK(stratified_folds(d, 3, 9).assignment == stratified_folds(d, 3, 9).assignment);
  CHECK(stratified_folds(d, 3, 9).assignment != stratified_folds(d, 3, 10).assignment);
  const auto loo = stratified_folds(d, d.size(), 1);
  for (auto s : loo.fold_sizes()) CHECK(s == 1);
  CHECK_THROWS_AS(stratified_folds(d, 1, 1), ConfigError);
  CHECK_THROWS_AS(stratified_folds(d, d.size() + 1, 1), ConfigError);
}

TEST_CASE("always-majority model scores the majority share") {
  const auto d = skewed(216, 87);
  // k covers nearly the whole training fold, so the vote is the fold majority
  const auto r = cross_validate(d, plain(knn(271)), stratified_folds(d, 10, 1));
  CHECK(r.metrics.confusion.tp == 216);
  CHECK(r.metrics.confusion.fp == 87);
  CHECK(*r.metrics.accuracy == doctest::Approx(216.0 / 303.0));
  CHECK(*r.metrics.accuracy == doctest::Approx(0.7129).epsilon(1e-4));
}

TEST_CASE("memorizing model under leave-one-out on duplicated records") {
  auto d = skewed(8, 6);
  const auto copy = d.records;
  d.records.insert(d.records.end(), copy.begin(), copy.end());
  const auto r = cross_validate(d, plain(knn(1)), stratified_folds(d, d.size(), 3));
  CHECK(*r.metrics.accuracy == 1.0);
}

TEST_CASE("pooled accuracy equals the pooled confusion matrix ratio") {
  const auto d = make_fixture({150, 0.7, 5, 0});
  auto p = plain(default_spec(ModelKind::naive_bayes));
  p.smote = true;
  p.selection_k = 8;
  const auto r = cross_validate(d, p, stratified_folds(d, 5, 2));
  const auto& c = r.metrics.confusion;
  CHECK(c.total() == d.size());
  CHECK(*r.metrics.accuracy == double(c.tp + c.tn) / double(c.total()));
  std::size_t correct = 0;
  for (const auto& h : r.predictions) correct += h.truth == h.predicted;
  CHECK(*r.metrics.accuracy == double(correct) / double(d.size()));
  for (const auto& names : r.fold_features) CHECK(names.size() == 8);
}

TEST_CASE("paper mode requires no SMOTE inside folds and sees the balanced set") {
  const auto d = make_fixture({150, 0.7, 5, 0});
  auto p = plain(default_spec(ModelKind::naive_bayes));
  p.mode = PipelineMode::paper;
  p.smote = true;
  const auto r = evaluate_pipeline(d, p, 5, 4);
  const auto counts = balance_for_paper_mode(d, p).class_counts();
  CHECK(counts[0] == counts[1]);
  CHECK(r.predictions.size() == counts[0] + counts[1]);
}

TEST_CASE("fold errors carry the fold id") {
  const auto d = skewed(12, 6);
  auto p = plain(knn(1));
  p.smote = true;
  p.smote_config.k_neighbors = 5;
  CHECK_THROWS_WITH_AS(cross_validate(d, p, stratified_folds(d, 3, 1)), doctest::Contains("fold 0: "), ConfigError);
}

TEST_CASE("grid cells are the Cartesian product, first axis slowest") {
  Grid g{{"learning_rate", {0.1, 0.3}}, {"momentum", {0.2, 0.5}}};
  const auto cells = grid_cells(g);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0] == nlohmann::json{{"learning_rate", 0.1}, {"momentum", 0.2}});
  CHECK(cells[1] == nlohmann::json{{"learning_rate", 0.1}, {"momentum", 0.5}});
  CHECK(cells[3] == nlohmann::json{{"learning_rate", 0.3}, {"momentum", 0.5}});
  const auto spec = apply_grid_cell(default_spec(ModelKind::mlp), cells[3]);
  CHECK(std::get<MlpParams>(spec.params).learning_rate == 0.3);
  CHECK(std::get<MlpParams>(spec.params).momentum == 0.5);
  CHECK_THROWS_AS(apply_grid_cell(default_spec(ModelKind::mlp), {{"nope", 1}}), ConfigError);
}

TEST_CASE("grid search picks the best inner-CV cell, first on ties") {
  const auto d = make_fixture({120, 0.7, 8, 0});
  const auto single = grid_search(d, knn(1), {{"k", {7}}}, 3, 1);
  CHECK(single.table.size() == 1);
  CHECK(std::get<KnnParams>(single.best.params).k == 7);

  const auto r = grid_search(d, knn(1), {{"k", {1, 3, 5}}}, 3, 1);
  REQUIRE(r.table.size() == 3);
  std::size_t best = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (*r.table[i].accuracy > *r.table[best].accuracy) best = i;
  CHECK(r.best_index == best);
  CHECK(std::get<KnnParams>(r.best.params).k == 1 + 2 * best);

  const auto tie = grid_search(d, knn(1), {{"k", {5, 5}}}, 3, 1);
  CHECK(tie.best_index == 0);

  const auto two_by_two = grid_search(d, default_spec(ModelKind::tree), {{"min_leaf", {2, 5}}, {"prune", {true, false}}}, 3, 1);
  CHECK(two_by_two.table.size() == 4);
}

TEST_CASE("grid search records failing cells and continues") {
  const auto d = make_fixture({60, 0.7, 8, 0});
  const auto r = grid_search(d, knn(1), {{"k", {2, 3}}}, 3, 1);
  CHECK_FALSE(r.table[0].accuracy.has_value());
  CHECK_FALSE(r.table[0].error.empty());
  CHECK(r.best_index == 1);
  CHECK_THROWS_AS(grid_search(d, knn(1), {{"k", {2, 4}}}, 3, 1), ConfigError);
  CHECK_THROWS_AS(grid_search(d, knn(1), {}, 3, 1), ConfigError);
}

TEST_CASE("benchmark: seven sorted rows, in-row failures, empty list") {
  const auto d = make_fixture({120, 0.72, 11, 0});
  auto pipelines = standard_pipelines(PipelineMode::per_fold, 3, false);
  for (auto& p : pipelines)
    if (auto* f = std::get_if<ForestParams>(&p.model.params)) f->n_trees = 15;
  const auto rows = benchmark_report(d, pipelines, 5, 3);
  REQUIRE(rows.size() == 7);
  std::set<std::string> ids;
  for (const auto& r : rows) ids.insert(r.id);
  CHECK(ids == std::set<std::string>{"ensemble1", "mlp", "rf", "adaboost", "j48", "nb", "knn"});
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(*rows[i - 1].result->metrics.accuracy >= *rows[i].result->metrics.accuracy);

  auto broken = pipelines;
  broken[1].smote_config.k_neighbors = 500;
  const auto with_error = benchmark_report(d, broken, 5, 3);
  CHECK(with_error.size() == 7);
  CHECK_FALSE(with_error.back().result.has_value());
  CHECK(with_error.back().error.find("fold 0") != std::string::npos);
  CHECK_THROWS_AS(benchmark_report(d, {}, 5, 3), ConfigError);
}

TEST_CASE("same seed, same cross-validation result") {
  const auto d = make_fixture({120, 0.72, 13, 0});
  auto p = standard_pipelines(PipelineMode::per_fold, 8, false)[2];
  std::get<ForestParams>(p.model.params).n_trees = 10;
  const auto a = evaluate_pipeline(d, p, 5, 8);
  const auto b = evaluate_pipeline(d, p, 5, 8);
  REQUIRE(a.predictions.size() == b.predictions.size());
  for (std::size_t i = 0; i < a.predictions.size(); ++i) {
    CHECK(a.predictions[i].p_positive == b.predictions[i].p_positive);
    CHECK(a.predictions[i].fold == b.predictions[i].fold);
  }
}

TEST_CASE("tuned pipelines record the chosen spec per fold") {
  const auto d = make_fixture({100, 0.7, 2, 0});
  auto p = plain(knn(1));
  p.tuning = Tuning{{{"k", {1, 3, 5, 7}}}, 3};
  const auto r = evaluate_pipeline(d, p, 4, 2);
  REQUIRE(r.fold_specs.size() == 4);
  for (const auto& s : r.fold_specs) CHECK(std::get<KnnParams>(s.params).k % 2 == 1);
}

TEST_CASE("fit_pipeline keeps selected features in schema order") {
  const auto d = make_fixture({120, 0.72, 4, 0});
  auto p = plain(default_spec(ModelKind::naive_bayes));
  p.selection_k = 5;
  p.smote = true;
  const auto m = fit_pipeline(d, p, 1);
  const auto names = m.schema.names();
  REQUIRE(names.size() == 5);
  std::vector<std::size_t> idx;
  for (const auto& n : names) idx.push_back(*d.schema.index_of(n));
  CHECK(std::is_sorted(idx.begin(), idx.end()));
}
