#include <doctest.h>

#include <cmath>

#include "cad/errors.hpp"
#include "cad/metrics.hpp"
#include "cad/rng.hpp"
#include "oracles.hpp"

using namespace cad;

namespace {

ConfusionMatrix cm(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) { return {tp, fp, fn, tn}; }

} // namespace

TEST_CASE("confusion cells follow CAD-positive convention") {
  std::vector<LabelPair> all_pos(7, LabelPair{1, 1});
  CHECK(confusion(all_pos) == cm(7, 0, 0, 0));
  std::vector<LabelPair> one_miss{{1, 0}};
  CHECK(confusion(one_miss) == cm(0, 0, 1, 0));
}

TEST_CASE("confusion equals brute-force tally on mixed pairs") {
  Rng rng(5);
  std::vector<LabelPair> pairs;
  std::vector<std::pair<int, int>> raw;
  for (int i = 0; i < 100; ++i) {
    int y = static_cast<int>(rng.uniform_index(2)), p = static_cast<int>(rng.uniform_index(2));
    pairs.push_back({y, p});
    raw.push_back({y, p});
  }
  const auto c = confusion(pairs);
  const auto t = oracle::tally(raw);
  CHECK(c.tp == std::size_t(t.tp));
  CHECK(c.fp == std::size_t(t.fp));
  CHECK(c.fn == std::size_t(t.fn));
  CHECK(c.tn == std::size_t(t.tn));
}

TEST_CASE("worked example 50/5/10/35") {
  const auto m = compute_metrics(cm(50, 5, 10, 35), {});
  CHECK(*m.accuracy == doctest::Approx(0.85));
  CHECK(*m.recall == doctest::Approx(0.8333).epsilon(1e-4));
  CHECK(*m.specificity == doctest::Approx(0.875));
  CHECK(*m.precision == doctest::Approx(0.9091).epsilon(1e-4));
  CHECK_FALSE(m.rmse.has_value());
  CHECK_FALSE(m.roc_auc.has_value());
}

TEST_CASE("perfect predictions") {
  std::vector<ScoredLabel> s;
  for (int i = 0; i < 10; ++i) s.push_back({i % 2, double(i % 2)});
  const auto m = compute_metrics(cm(5, 0, 0, 5), s);
  for (auto v : {m.accuracy, m.precision, m.recall, m.specificity, m.f_measure, m.mcc, m.kappa, m.roc_auc})
    CHECK(*v == 1.0);
  CHECK(*m.rmse == 0.0);
}

TEST_CASE("zero denominators are undefined, not zero") {
  const auto m = compute_metrics(cm(0, 0, 0, 10), {});
  CHECK(*m.accuracy == 1.0);
  CHECK_FALSE(m.precision.has_value());
  CHECK_FALSE(m.recall.has_value());
  CHECK_FALSE(m.f_measure.has_value());
  CHECK_FALSE(m.mcc.has_value());
  const auto empty = compute_metrics(cm(0, 0, 0, 0), {});
  CHECK_FALSE(empty.accuracy.has_value());
}

TEST_CASE("fuzzed confusion matrices agree with arithmetic oracles") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto c = cm(rng.uniform_index(60), rng.uniform_index(60), rng.uniform_index(60), rng.uniform_index(60));
    if (c.total() == 0) continue;
    const auto m = compute_metrics(c, {});
    const double tp = double(c.tp), fp = double(c.fp), fn = double(c.fn), tn = double(c.tn);
    CHECK(*m.accuracy == (tp + tn) / (tp + fp + fn + tn));
    if (c.tp + c.fn > 0) CHECK(*m.recall == tp / (tp + fn));
    if (c.tn + c.fp > 0) CHECK(*m.specificity == tn / (tn + fp));
    if (c.tp + c.fp > 0) CHECK(*m.precision == tp / (tp + fp));
    if (m.precision && m.recall && *m.precision + *m.recall > 0) {
      const double h = 2 * *m.precision * *m.recall / (*m.precision + *m.recall);
      CHECK(std::abs(*m.f_measure - h) < 1e-12);
      CHECK(*m.f_measure <= std::max(*m.precision, *m.recall) + 1e-15);
      CHECK(*m.f_measure >= std::min(*m.precision, *m.recall) - 1e-15);
    }
    const oracle::Tally t{long(c.tp), long(c.fp), long(c.fn), long(c.tn)};
    if (m.mcc) CHECK(std::abs(*m.mcc - oracle::mcc(t)) < 1e-12);
    if (m.kappa) CHECK(std::abs(*m.kappa - oracle::kappa(t)) < 1e-12);
  }
}

TEST_CASE("independent predictions give zero MCC and kappa") {
  // margins 40/60 truth, 30/70 predicted, cells proportional
  const auto m = compute_metrics(cm(12, 18, 28, 42), {});
  CHECK(std::abs(*m.mcc) < 1e-12);
  CHECK(std::abs(*m.kappa) < 1e-12);
}

TEST_CASE("rmse over p_positive") {
  std::vector<ScoredLabel> s{{1, 0.8}, {0, 0.4}};
  const auto m = compute_metrics(cm(1, 0, 0, 1), s);
  CHECK(*m.rmse == doctest::Approx(std::sqrt((0.04 + 0.16) / 2)));
}

TEST_CASE("roc: separation, constant scores, single class") {
  std::vector<ScoredLabel> sep{{0, 0.1}, {0, 0.2}, {1, 0.7}, {1, 0.9}};
  CHECK(roc_auc(sep).auc == 1.0);
  std::vector<ScoredLabel> flat{{0, 0.5}, {1, 0.5}, {1, 0.5}, {0, 0.5}, {1, 0.5}};
  const auto c = roc_auc(flat);
  CHECK(c.auc == 0.5);
  REQUIRE(c.points.size() == 2);
  std::vector<ScoredLabel> one{{1, 0.3}, {1, 0.6}};
  CHECK_THROWS_AS(roc_auc(one), DataError);
}

TEST_CASE("roc curve starts at origin, ends at (1,1), is monotone") {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ScoredLabel> s;
    for (int i = 0; i < 40; ++i) s.push_back({i % 3 == 0 ? 1 : 0, std::round(rng.uniform01() * 10) / 10});
    const auto c = roc_auc(s);
    CHECK(c.points.front().fpr == 0.0);
    CHECK(c.points.front().tpr == 0.0);
    CHECK(std::isinf(c.points.front().threshold));
    CHECK(c.points.back().fpr == 1.0);
    CHECK(c.points.back().tpr == 1.0);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      CHECK(c.points[i].fpr >= c.points[i - 1].fpr);
      CHECK(c.points[i].tpr >= c.points[i - 1].tpr);
      CHECK(c.points[i].threshold < c.points[i - 1].threshold);
    }
  }
}

TEST_CASE("auc equals the pairwise Mann-Whitney oracle, ties included") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ScoredLabel> s;
    std::vector<std::pair<int, double>> raw;
    for (int i = 0; i < 30; ++i) {
      const int y = i < 10 ? 1 : static_cast<int>(rng.uniform_index(2));
      const double p = std::round(rng.uniform01() * 8) / 8;
      s.push_back({y, p});
      raw.push_back({y, p});
    }
    CHECK(std::abs(roc_auc(s).auc - oracle::auc_pairs(raw)) < 1e-12);
  }
}

TEST_CASE("auc invariant under strictly monotone transforms") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ScoredLabel> s, t;
    for (int i = 0; i < 25; ++i) {
      const int y = i < 5 ? i % 2 : static_cast<int>(rng.uniform_index(2));
      const double p = std::round(rng.uniform01() * 20) / 20;
      s.push_back({y, p});
      t.push_back({y, std::exp(3 * p) - 7});
    }
    CHECK(roc_auc(s).auc == roc_auc(t).auc);
  }
}

TEST_CASE("random scores give auc near 0.5") {
  Rng rng(123);
  std::vector<ScoredLabel> s;
  for (int i = 0; i < 1000; ++i) s.push_back({static_cast<int>(rng.uniform_index(2)), rng.uniform01()});
  CHECK(std::abs(roc_auc(s).auc - 0.5) < 0.05);
}
