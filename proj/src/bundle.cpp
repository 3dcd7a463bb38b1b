#include "cad/bundle.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "cad/errors.hpp"

namespace cad {

using nlohmann::json;

namespace {

constexpr std::string_view kMagic = "CADM";

json tree_to_json(const TreeModel& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes) {
    json jn{{"f", n.feature}, {"p", n.p_positive}, {"w", n.weight}, {"wp", n.weight_positive}};
    if (n.feature >= 0) {
      jn["numeric"] = n.numeric_split;
      if (n.numeric_split) jn["thr"] = n.threshold;
      else jn["values"] = n.branch_values;
      jn["children"] = n.children;
    }
    nodes.push_back(std::move(jn));
  }
  return nodes;
}

TreeModel tree_from_json(const json& j) {
  TreeModel t;
  for (const auto& jn : j) {
    TreeNode n;
    n.feature = jn.at("f").get<int>();
    n.p_positive = jn.at("p").get<double>();
    n.weight = jn.at("w").get<double>();
    n.weight_positive = jn.at("wp").get<double>();
    if (n.feature >= 0) {
      n.numeric_split = jn.at("numeric").get<bool>();
      if (n.numeric_split) n.threshold = jn.at("thr").get<double>();
      else n.branch_values = jn.at("values").get<std::vector<double>>();
      n.children = jn.at("children").get<std::vector<int>>();
    }
    t.nodes.push_back(std::move(n));
  }
  // structural sanity: children must point forward inside the array
  for (std::size_t i = 0; i < t.nodes.size(); ++i)
    for (int c : t.nodes[i].children)
      if (c <= static_cast<int>(i) || c >= static_cast<int>(t.nodes.size()))
        throw BundleError("bundle: malformed tree node links");
  if (t.nodes.empty()) throw BundleError("bundle: empty tree");
  return t;
}

json payload_to_json(const ModelPayload& payload) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TreeModel>) {
          return {{"nodes", tree_to_json(p)}};
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          json trees = json::array();
          for (const auto& t : p.trees) trees.push_back(tree_to_json(t));
          return {{"trees", trees}};
        } else if constexpr (std::is_same_v<T, AdaBoostModel>) {
          json learners = json::array();
          for (const auto& t : p.learners) learners.push_back(tree_to_json(t));
          json trace = json::array();
          for (const auto& r : p.trace) trace.push_back({r.error, r.alpha, r.weight_sum});
          return {{"learners", learners}, {"alphas", p.alphas}, {"trace", trace}, {"weak_warning", p.weak_warning}};
        } else if constexpr (std::is_same_v<T, MlpModel>) {
          return {{"layer_sizes", p.layer_sizes},
                  {"weights", p.weights},
                  {"final_loss", p.final_loss},
                  {"non_monotone", p.non_monotone},
                  {"first_increase_epoch", p.first_increase_epoch ? json(*p.first_increase_epoch) : json(nullptr)}};
        } else if constexpr (std::is_same_v<T, NaiveBayesModel>) {
          json features = json::array();
          for (const auto& f : p.features) {
            if (const auto* g = std::get_if<NaiveBayesModel::Gaussian>(&f)) {
              features.push_back({{"type", "gaussian"}, {"mean", g->mean}, {"var", g->var}});
            } else {
              const auto& fr = std::get<NaiveBayesModel::Frequencies>(f);
              json counts = json::array();
              for (const auto& [v, c] : fr.counts) counts.push_back({v, c[0], c[1]});
              features.push_back(
                  {{"type", "frequencies"}, {"counts", counts}, {"totals", fr.totals}, {"vocabulary", fr.vocabulary}});
            }
          }
          return {{"priors", p.priors}, {"features", features}};
        } else if constexpr (std::is_same_v<T, KnnModel>) {
          return {{"k", p.k}, {"cols", p.cols}, {"x", p.x}, {"y", p.y}};
        } else {
          json members = json::array();
          for (const auto& m : p.members) members.push_back(model_to_json(m));
          return {{"members", members},
                  {"tie_break", p.tie_break.mode == TieBreak::Mode::confidence ? "confidence" : "fixed"},
                  {"fixed_label", p.tie_break.fixed_label}};
        }
      },
      payload);
}

ModelPayload payload_from_json(ModelKind kind, const json& j) {
  switch (kind) {
  case ModelKind::tree: return tree_from_json(j.at("nodes"));
  case ModelKind::forest: {
    ForestModel f;
    for (const auto& t : j.at("trees")) f.trees.push_back(tree_from_json(t));
    if (f.trees.empty()) throw BundleError("bundle: forest without trees");
    return f;
  }
  case ModelKind::adaboost: {
    AdaBoostModel a;
    for (const auto& t : j.at("learners")) a.learners.push_back(tree_from_json(t));
    a.alphas = j.at("alphas").get<std::vector<double>>();
    for (const auto& r : j.at("trace")) a.trace.push_back({r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()});
    a.weak_warning = j.at("weak_warning").get<bool>();
    if (a.alphas.size() != a.learners.size() || a.learners.empty()) throw BundleError("bundle: inconsistent adaboost");
    return a;
  }
  case ModelKind::mlp: {
    MlpModel m;
    m.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    m.final_loss = j.at("final_loss").get<double>();
    m.non_monotone = j.at("non_monotone").get<bool>();
    if (!j.at("first_increase_epoch").is_null()) m.first_increase_epoch = j.at("first_increase_epoch").get<std::size_t>();
    if (m.layer_sizes.size() < 2 || m.weights.size() + 1 != m.layer_sizes.size()) throw BundleError("bundle: inconsistent mlp");
    for (std::size_t l = 0; l < m.weights.size(); ++l)
      if (m.weights[l].size() != m.layer_sizes[l + 1] * (m.layer_sizes[l] + 1)) throw BundleError("bundle: mlp weight shape");
    return m;
  }
  case ModelKind::naive_bayes: {
    NaiveBayesModel nb;
    nb.priors = j.at("priors").get<std::array<double, 2>>();
    for (const auto& f : j.at("features")) {
      if (f.at("type") == "gaussian") {
        NaiveBayesModel::Gaussian g;
        g.mean = f.at("mean").get<std::array<double, 2>>();
        g.var = f.at("var").get<std::array<double, 2>>();
        nb.features.emplace_back(g);
      } else {
        NaiveBayesModel::Frequencies fr;
        for (const auto& c : f.at("counts")) fr.counts[c.at(0).get<double>()] = {c.at(1).get<double>(), c.at(2).get<double>()};
        fr.totals = f.at("totals").get<std::array<double, 2>>();
        fr.vocabulary = f.at("vocabulary").get<double>();
        nb.features.emplace_back(std::move(fr));
      }
    }
    return nb;
  }
  case ModelKind::knn: {
    KnnModel k;
    k.k = j.at("k").get<std::size_t>();
    k.cols = j.at("cols").get<std::size_t>();
    k.x = j.at("x").get<std::vector<double>>();
    k.y = j.at("y").get<std::vector<int>>();
    if (k.x.size() != k.cols * k.y.size() || k.k > k.y.size()) throw BundleError("bundle: inconsistent knn");
    return k;
  }
  case ModelKind::voting: {
    VotingModel v;
    for (const auto& m : j.at("members")) v.members.push_back(model_from_json(m));
    v.tie_break.mode = j.at("tie_break") == "confidence" ? TieBreak::Mode::confidence : TieBreak::Mode::fixed_label;
    v.tie_break.fixed_label = j.at("fixed_label").get<int>();
    if (v.members.size() < 2) throw BundleError("bundle: ensemble with fewer than 2 members");
    return v;
  }
  }
  throw BundleError("bundle: unknown model kind");
}

json record_to_json(const PatientRecord& r) {
  return {{"values", r.values}, {"label", r.label ? json(*r.label) : json(nullptr)}, {"out_of_range", r.out_of_range}};
}

PatientRecord record_from_json(const json& j) {
  PatientRecord r;
  r.values = j.at("values").get<std::vector<double>>();
  if (!j.at("label").is_null()) r.label = j.at("label").get<int>();
  r.out_of_range = j.at("out_of_range").get<bool>();
  return r;
}

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

} // namespace

std::uint32_t crc32_of(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
  return static_cast<std::uint32_t>(crc);
}

json model_to_json(const TrainedModel& m) {
  return {{"kind", to_string(m.kind())},
          {"schema", to_json(m.schema)},
          {"scaling", m.scaling ? to_json(*m.scaling) : json(nullptr)},
          {"spec", to_json(m.meta.spec)},
          {"train_size", m.meta.train_size},
          {"warnings", m.meta.warnings},
          {"payload", payload_to_json(m.payload)}};
}

TrainedModel model_from_json(const json& j) {
  TrainedModel m;
  const auto kind = model_kind_from_string(j.at("kind").get<std::string>());
  m.schema = schema_from_json(j.at("schema"));
  if (!j.at("scaling").is_null()) m.scaling = scaling_from_json(j.at("scaling"));
  m.meta.spec = spec_from_json(j.at("spec"));
  m.meta.train_size = j.at("train_size").get<std::size_t>();
  m.meta.warnings = j.at("warnings").get<std::vector<std::string>>();
  m.payload = payload_from_json(kind, j.at("payload"));
  if (m.kind() != kind) throw BundleError("bundle: payload kind mismatch");
  return m;
}

std::string encode_bundle(const ModelBundle& b) {
  json body{{"schema_version", kBundleSchemaVersion},
            {"model", model_to_json(b.model)},
            {"metrics", b.metrics},
            {"run", b.run},
            {"canary", b.canary ? json{{"record", record_to_json(b.canary->record)},
                                       {"label", b.canary->expected.label},
                                       {"p_positive", b.canary->expected.p_positive}}
                                : json(nullptr)}};
  const std::string text = body.dump();
  return std::string(kMagic) + " " + std::to_string(kBundleFormatVersion) + " " + hex32(crc32_of(text)) + " " +
         std::to_string(text.size()) + "\n" + text;
}

ModelBundle decode_bundle(const std::string& bytes) {
  const auto nl = bytes.find('\n');
  if (bytes.size() < kMagic.size() || bytes.compare(0, kMagic.size(), kMagic) != 0)
    throw BundleError("bundle: bad magic (not a CADM model bundle)");
  if (nl == std::string::npos) throw BundleError("bundle: truncated header");
  std::istringstream header(bytes.substr(0, nl));
  std::string magic, crc_text;
  int format = 0;
  std::size_t length = 0;
  if (!(header >> magic >> format >> crc_text >> length)) throw BundleError("bundle: corrupt header");
  if (format > kBundleFormatVersion)
    throw BundleError("bundle: format version " + std::to_string(format) + " is newer than supported " +
                      std::to_string(kBundleFormatVersion));
  if (format < 1) throw BundleError("bundle: invalid format version");
  const std::string body = bytes.substr(nl + 1);
  if (body.size() != length)
    throw BundleError("bundle: truncated or padded body (" + std::to_string(body.size()) + " of " +
                      std::to_string(length) + " bytes)");
  if (hex32(crc32_of(body)) != crc_text) throw BundleError("bundle: checksum mismatch (file is corrupt)");

  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw BundleError(std::string("bundle: corrupt body: ") + e.what());
  }
  const int schema_version = j.value("schema_version", 0);
  if (schema_version > kBundleSchemaVersion)
    throw BundleError("bundle: schema version " + std::to_string(schema_version) + " is newer than supported " +
                      std::to_string(kBundleSchemaVersion));
  if (schema_version < 1) throw BundleError("bundle: missing schema version");
  try {
    ModelBundle b{model_from_json(j.at("model")), j.value("metrics", json::object()), j.value("run", json::object()),
                  std::nullopt};
    if (!j.at("canary").is_null()) {
      const auto& c = j.at("canary");
      b.canary = Canary{record_from_json(c.at("record")), {c.at("label").get<int>(), c.at("p_positive").get<double>()}};
    }
    return b;
  } catch (const json::exception& e) {
    throw BundleError(std::string("bundle: malformed body: ") + e.what());
  } catch (const ConfigError& e) {
    throw BundleError(std::string("bundle: malformed body: ") + e.what());
  } catch (const DataError& e) {
    throw BundleError(std::string("bundle: malformed body: ") + e.what());
  }
}

void save_bundle(const ModelBundle& bundle, const std::string& path) {
  const auto bytes = encode_bundle(bundle);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BundleError("cannot write bundle '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw BundleError("failed writing bundle '" + path + "'");
}

void save_bundle(const TrainedModel& model, const std::string& path) { save_bundle(ModelBundle{model, {}, {}, std::nullopt}, path); }

ModelBundle load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BundleError("cannot open bundle '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return decode_bundle(ss.str());
}

std::string bundle_version_id(const std::string& bytes) {
  const auto nl = bytes.find('\n');
  return "cadm" + std::to_string(kBundleFormatVersion) + "-" +
         hex32(crc32_of(nl == std::string::npos ? std::string_view(bytes) : std::string_view(bytes).substr(nl + 1)));
}

std::optional<std::string> check_canary(const ModelBundle& bundle) {
  if (!bundle.canary) return std::nullopt;
  try {
    const auto got = predict(bundle.model, bundle.canary->record);
    if (got.label != bundle.canary->expected.label || got.p_positive != bundle.canary->expected.p_positive)
      return "canary prediction mismatch: expected (" + std::to_string(bundle.canary->expected.label) + ", " +
             std::to_string(bundle.canary->expected.p_positive) + "), got (" + std::to_string(got.label) + ", " +
             std::to_string(got.p_positive) + ")";
  } catch (const std::exception& e) {
    return std::string("canary prediction failed: ") + e.what();
  }
  return std::nullopt;
}

} // namespace cad
