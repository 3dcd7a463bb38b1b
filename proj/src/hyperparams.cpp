#include "cad/hyperparams.hpp"

#include "cad/errors.hpp"

namespace cad {

using nlohmann::json;

std::string_view to_string(ModelKind kind) {
  switch (kind) {
  case ModelKind::tree: return "tree";
  case ModelKind::forest: return "forest";
  case ModelKind::adaboost: return "adaboost";
  case ModelKind::mlp: return "mlp";
  case ModelKind::naive_bayes: return "naive_bayes";
  case ModelKind::knn: return "knn";
  case ModelKind::voting: return "voting";
  }
  return "tree";
}

ModelKind model_kind_from_string(std::string_view text) {
  for (auto k : {ModelKind::tree, ModelKind::forest, ModelKind::adaboost, ModelKind::mlp, ModelKind::naive_bayes,
                 ModelKind::knn, ModelKind::voting})
    if (to_string(k) == text) return k;
  if (text == "j48") return ModelKind::tree;
  if (text == "rf") return ModelKind::forest;
  if (text == "nb") return ModelKind::naive_bayes;
  throw ConfigError("unknown model kind '" + std::string(text) + "'");
}

ModelSpec default_spec(ModelKind kind) {
  switch (kind) {
  case ModelKind::tree: return {TreeParams{}};
  case ModelKind::forest: return {ForestParams{}};
  case ModelKind::adaboost: return {AdaBoostParams{}};
  case ModelKind::mlp: return {MlpParams{}};
  case ModelKind::naive_bayes: return {NaiveBayesParams{}};
  case ModelKind::knn: return {KnnParams{}};
  case ModelKind::voting: {
    VotingParams v;
    v.members = {default_spec(ModelKind::mlp), default_spec(ModelKind::forest), default_spec(ModelKind::adaboost)};
    return {v};
  }
  }
  throw ConfigError("unknown model kind");
}

namespace {

void validate_tree(const TreeParams& t) {
  if (t.min_leaf < 1) throw ConfigError("tree: min_leaf must be >= 1");
  if (t.max_depth && *t.max_depth < 1) throw ConfigError("tree: max_depth must be >= 1");
}

struct Validator {
  void operator()(const TreeParams& t) const { validate_tree(t); }
  void operator()(const ForestParams& f) const {
    if (f.n_trees < 1) throw ConfigError("forest: n_trees must be >= 1");
    validate_tree(f.tree);
  }
  void operator()(const AdaBoostParams& a) const {
    if (a.n_rounds < 1) throw ConfigError("adaboost: n_rounds must be >= 1");
    if (a.weak_depth < 1) throw ConfigError("adaboost: weak_depth must be >= 1");
  }
  void operator()(const MlpParams& m) const {
    if (!(m.learning_rate > 0)) throw ConfigError("mlp: learning_rate must be > 0");
    if (!(m.momentum >= 0 && m.momentum < 1)) throw ConfigError("mlp: momentum must be in [0, 1)");
    if (m.epochs < 1) throw ConfigError("mlp: epochs must be >= 1");
    if (m.hidden_layers)
      for (auto h : *m.hidden_layers)
        if (h < 1) throw ConfigError("mlp: hidden layer sizes must be >= 1");
  }
  void operator()(const NaiveBayesParams&) const {}
  void operator()(const KnnParams& k) const {
    if (k.k < 1 || k.k % 2 == 0) throw ConfigError("knn: k must be a positive odd integer");
  }
  void operator()(const VotingParams& v) const {
    if (v.members.size() < 2) throw ConfigError("ensemble requires >= 2 members");
    for (const auto& m : v.members) {
      if (m.kind() == ModelKind::voting) throw ConfigError("ensemble members cannot be ensembles");
      validate(m);
    }
    if (v.tie_break.fixed_label != 0 && v.tie_break.fixed_label != 1)
      throw ConfigError("tie_break fixed label must be 0 or 1");
  }
};

json tree_json(const TreeParams& t) {
  return {{"min_leaf", t.min_leaf}, {"max_depth", t.max_depth ? json(*t.max_depth) : json(nullptr)}, {"prune", t.prune}};
}

TreeParams tree_from(const json& j, TreeParams t) {
  t.min_leaf = j.value("min_leaf", t.min_leaf);
  if (j.contains("max_depth")) {
    if (j["max_depth"].is_null()) t.max_depth.reset();
    else t.max_depth = j["max_depth"].get<std::size_t>();
  }
  t.prune = j.value("prune", t.prune);
  return t;
}

} // namespace

void validate(const ModelSpec& spec) { std::visit(Validator{}, spec.params); }

ModelSpec with_seed(const ModelSpec& spec, std::uint64_t seed) {
  ModelSpec out = spec;
  std::visit(
      [&](auto& p) {
        if constexpr (requires { p.seed; }) {
          p.seed = seed;
        }
      },
      out.params);
  return out;
}

std::optional<std::uint64_t> seed_of(const ModelSpec& spec) {
  return std::visit(
      [](const auto& p) -> std::optional<std::uint64_t> {
        if constexpr (requires { p.seed; }) return p.seed;
        else return std::nullopt;
      },
      spec.params);
}

json to_json(const ModelSpec& spec) {
  json params = std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TreeParams>) {
          return tree_json(p);
        } else if constexpr (std::is_same_v<T, ForestParams>) {
          return {{"n_trees", p.n_trees}, {"features_per_split", p.features_per_split}, {"bootstrap", p.bootstrap},
                  {"seed", p.seed}, {"tree", tree_json(p.tree)}};
        } else if constexpr (std::is_same_v<T, AdaBoostParams>) {
          return {{"n_rounds", p.n_rounds}, {"weak_depth", p.weak_depth}, {"seed", p.seed}};
        } else if constexpr (std::is_same_v<T, MlpParams>) {
          return {{"hidden_layers", p.hidden_layers ? json(*p.hidden_layers) : json("auto")},
                  {"learning_rate", p.learning_rate},
                  {"momentum", p.momentum},
                  {"epochs", p.epochs},
                  {"seed", p.seed}};
        } else if constexpr (std::is_same_v<T, NaiveBayesParams>) {
          return json::object();
        } else if constexpr (std::is_same_v<T, KnnParams>) {
          return {{"k", p.k}};
        } else {
          json members = json::array();
          for (const auto& m : p.members) members.push_back(to_json(m));
          return {{"members", members},
                  {"tie_break", p.tie_break.mode == TieBreak::Mode::confidence ? json("confidence")
                                                                               : json(p.tie_break.fixed_label)},
                  {"seed", p.seed}};
        }
      },
      spec.params);
  return {{"kind", to_string(spec.kind())}, {"params", params}};
}

ModelSpec spec_from_json(const json& j) {
  try {
    const auto kind = model_kind_from_string(j.at("kind").get<std::string>());
    const json p = j.value("params", json::object());
    ModelSpec spec = default_spec(kind);
    std::visit(
        [&](auto& hp) {
          using T = std::decay_t<decltype(hp)>;
          if constexpr (std::is_same_v<T, TreeParams>) {
            hp = tree_from(p, hp);
          } else if constexpr (std::is_same_v<T, ForestParams>) {
            hp.n_trees = p.value("n_trees", hp.n_trees);
            hp.features_per_split = p.value("features_per_split", hp.features_per_split);
            hp.bootstrap = p.value("bootstrap", hp.bootstrap);
            hp.seed = p.value("seed", hp.seed);
            if (p.contains("tree")) hp.tree = tree_from(p["tree"], hp.tree);
          } else if constexpr (std::is_same_v<T, AdaBoostParams>) {
            hp.n_rounds = p.value("n_rounds", hp.n_rounds);
            hp.weak_depth = p.value("weak_depth", hp.weak_depth);
            hp.seed = p.value("seed", hp.seed);
          } else if constexpr (std::is_same_v<T, MlpParams>) {
            if (p.contains("hidden_layers")) {
              if (p["hidden_layers"].is_string()) hp.hidden_layers.reset();
              else hp.hidden_layers = p["hidden_layers"].get<std::vector<std::size_t>>();
            }
            hp.learning_rate = p.value("learning_rate", hp.learning_rate);
            hp.momentum = p.value("momentum", hp.momentum);
            hp.epochs = p.value("epochs", hp.epochs);
            hp.seed = p.value("seed", hp.seed);
          } else if constexpr (std::is_same_v<T, KnnParams>) {
            hp.k = p.value("k", hp.k);
          } else if constexpr (std::is_same_v<T, VotingParams>) {
            if (p.contains("members")) {
              hp.members.clear();
              for (const auto& m : p["members"]) hp.members.push_back(spec_from_json(m));
            }
            if (p.contains("tie_break")) {
              if (p["tie_break"].is_string()) {
                if (p["tie_break"].get<std::string>() != "confidence") throw ConfigError("unknown tie_break");
                hp.tie_break.mode = TieBreak::Mode::confidence;
              } else {
                hp.tie_break.mode = TieBreak::Mode::fixed_label;
                hp.tie_break.fixed_label = p["tie_break"].get<int>();
              }
            }
            hp.seed = p.value("seed", hp.seed);
          }
        },
        spec.params);
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid model spec: ") + e.what());
  }
}

} // namespace cad
