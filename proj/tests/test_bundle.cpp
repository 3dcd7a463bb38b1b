#include <doctest.h>

#include <filesystem>

#include "cad/bundle.hpp"
#include "cad/errors.hpp"
#include "cad/fixture.hpp"
#include "cad/model.hpp"

using namespace cad;

namespace {

std::vector<TrainedModel> small_models(const Dataset& d) {
  std::vector<TrainedModel> out;
  for (auto kind : {ModelKind::tree, ModelKind::forest, ModelKind::adaboost, ModelKind::mlp, ModelKind::naive_bayes,
                    ModelKind::knn, ModelKind::voting}) {
    auto spec = default_spec(kind);
    if (auto* f = std::get_if<ForestParams>(&spec.params)) f->n_trees = 5;
    if (auto* m = std::get_if<MlpParams>(&spec.params)) m->epochs = 50;
    if (auto* v = std::get_if<VotingParams>(&spec.params)) {
      std::get<ForestParams>(v->members[1].params).n_trees = 5;
      std::get<MlpParams>(v->members[0].params).epochs = 50;
    }
    out.push_back(train_model(d, spec));
  }
  return out;
}

} // namespace

TEST_CASE("round trip reproduces predictions bit for bit") {
  const auto d = make_fixture({100, 0.72, 71, 0});
  for (const auto& m : small_models(d)) {
    CAPTURE(to_string(m.kind()));
    const auto back = decode_bundle(encode_bundle(ModelBundle{m, {}, {}, std::nullopt}));
    CHECK(back.model.schema == m.schema);
    for (const auto& r : d.records) {
      const auto a = predict(m, r), b = predict(back.model, r);
      CHECK(a.label == b.label);
      CHECK(a.p_positive == b.p_positive);
    }
  }
}

TEST_CASE("encoding is deterministic and carries the header") {
  const auto d = make_fixture({60, 0.72, 71, 0});
  const auto m = train_model(d, default_spec(ModelKind::tree));
  const auto a = encode_bundle(ModelBundle{m, {}, {}, std::nullopt});
  CHECK(a == encode_bundle(ModelBundle{m, {}, {}, std::nullopt}));
  CHECK(a.rfind("CADM 1 ", 0) == 0);
  CHECK(bundle_version_id(a).rfind("cadm1-", 0) == 0);
}

TEST_CASE("corruption and version errors are refused") {
  const auto d = make_fixture({60, 0.72, 71, 0});
  const auto bytes = encode_bundle(ModelBundle{train_model(d, default_spec(ModelKind::naive_bayes)), {}, {}, std::nullopt});
  const auto body = bytes.find('\n') + 1;
  for (std::size_t pos : {body, body + 10, bytes.size() / 2, bytes.size() - 2}) {
    auto flipped = bytes;
    flipped[pos] = static_cast<char>(flipped[pos] ^ 0x01);
    CHECK_THROWS_AS(decode_bundle(flipped), BundleError);
  }
  CHECK_THROWS_WITH_AS(decode_bundle("PK\x03\x04 zip"), doctest::Contains("magic"), BundleError);
  CHECK_THROWS_AS(decode_bundle(bytes.substr(0, bytes.size() - 1)), BundleError);
  auto newer = bytes;
  newer[5] = '9';
  CHECK_THROWS_WITH_AS(decode_bundle(newer), doctest::Contains("newer"), BundleError);
  CHECK_THROWS_AS(load_bundle("/nonexistent/model.cadm"), BundleError);
}

TEST_CASE("canary passes on a faithful bundle and fails on a tampered one") {
  const auto d = make_fixture({60, 0.72, 71, 0});
  const auto m = train_model(d, default_spec(ModelKind::tree));
  ModelBundle b{m, {{"accuracy", 0.9}}, {{"seed", 42}}, Canary{d.records[0], predict(m, d.records[0])}};
  const auto back = decode_bundle(encode_bundle(b));
  CHECK_FALSE(check_canary(back).has_value());
  CHECK(back.metrics == b.metrics);
  CHECK(back.run == b.run);
  auto bad = back;
  bad.canary->expected.p_positive = std::nextafter(bad.canary->expected.p_positive, 2.0);
  CHECK(check_canary(bad).has_value());
}

TEST_CASE("save and load through a file") {
  const auto d = make_fixture({60, 0.72, 71, 0});
  const auto m = train_model(d, default_spec(ModelKind::knn));
  const auto path = (std::filesystem::temp_directory_path() / "cad_test_bundle.cadm").string();
  save_bundle(m, path);
  const auto back = load_bundle(path);
  CHECK(predict(back.model, d.records[5]) == predict(m, d.records[5]));
  std::filesystem::remove(path);
}
