#include "cad/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "cad/errors.hpp"
#include "cad/rng.hpp"

namespace cad {

namespace {

double entropy2(double w0, double w1) {
  const double w = w0 + w1;
  if (w <= 0) return 0;
  double h = 0;
  for (double c : {w0, w1})
    if (c > 0) h -= (c / w) * std::log2(c / w);
  return h;
}

double entropy_of(std::span<const double> weights) {
  double total = 0;
  for (double w : weights) total += w;
  if (total <= 0) return 0;
  double h = 0;
  for (double w : weights)
    if (w > 0) h -= (w / total) * std::log2(w / total);
  return h;
}

struct Candidate {
  std::size_t feature = 0;
  bool numeric = true;
  double threshold = 0;
  std::vector<double> values;
  double gain = 0;
  double ratio = 0;
};

/// C4.5 pessimistic error increment (confidence 0.25).
double added_errors(double n, double e) {
  constexpr double cf = 0.25;
  constexpr double z = 0.6744897501960817;
  if (n <= 0) return 0;
  if (e < 1) {
    const double base = n * (1 - std::pow(cf, 1.0 / n));
    if (e == 0) return base;
    return base + e * (added_errors(n, 1) - base);
  }
  if (e + 0.5 >= n) return std::max(n - e, 0.0);
  const double f = (e + 0.5) / n;
  const double r = (f + z * z / (2 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (1 + z * z / n);
  return r * n - e;
}

class TreeBuilder {
public:
  TreeBuilder(const TrainMatrix& m, std::span<const std::size_t> rows, std::span<const double> weights,
              const TreeGrowOptions& opt)
      : m_(m), rows_(rows), w_(weights), opt_(opt) {}

  TreeModel build() {
    std::vector<std::size_t> pos(rows_.size());
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    grow(pos, 0);
    if (opt_.params.prune) {
      prune(0);
      compact();
    }
    return std::move(tree_);
  }

private:
  int grow(const std::vector<std::size_t>& pos, std::size_t depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double w0 = 0, w1 = 0;
    for (auto p : pos) (m_.y[rows_[p]] == 1 ? w1 : w0) += w_[p];
    {
      auto& node = tree_.nodes[id];
      node.weight = w0 + w1;
      node.weight_positive = w1;
      node.p_positive = (w1 + 1) / (w0 + w1 + 2);
    }
    const auto min_leaf = opt_.params.min_leaf;
    if (w0 == 0 || w1 == 0) return id;
    if (pos.size() < 2 * min_leaf) return id;
    if (opt_.params.max_depth && depth >= *opt_.params.max_depth) return id;

    auto best = choose_split(pos, w0, w1);
    if (!best) return id;

    // partition
    std::vector<std::vector<std::size_t>> parts;
    if (best->numeric) {
      parts.resize(2);
      for (auto p : pos) parts[value(p, best->feature) <= best->threshold ? 0 : 1].push_back(p);
    } else {
      parts.resize(best->values.size());
      for (auto p : pos) {
        auto it = std::lower_bound(best->values.begin(), best->values.end(), value(p, best->feature));
        parts[static_cast<std::size_t>(it - best->values.begin())].push_back(p);
      }
    }
    std::vector<int> children;
    for (auto& part : parts) children.push_back(grow(part, depth + 1));
    auto& node = tree_.nodes[id];
    node.feature = static_cast<int>(best->feature);
    node.numeric_split = best->numeric;
    node.threshold = best->threshold;
    node.branch_values = std::move(best->values);
    node.children = std::move(children);
    return id;
  }

  double value(std::size_t pos, std::size_t feature) const { return m_.at(rows_[pos], feature); }

  std::optional<Candidate> choose_split(const std::vector<std::size_t>& pos, double w0, double w1) {
    std::vector<std::size_t> features;
    if (opt_.features_per_split > 0 && opt_.rng) {
      features = opt_.rng->sample_without_replacement(m_.cols, std::min(opt_.features_per_split, m_.cols));
    } else {
      features.resize(m_.cols);
      std::iota(features.begin(), features.end(), std::size_t{0});
    }
    const double parent_h = entropy2(w0, w1);
    const double total = w0 + w1;
    std::vector<Candidate> cands;
    for (auto f : features) {
      auto c = m_.kinds[f] == FeatureKind::numeric ? numeric_split(pos, f, parent_h, total)
                                                   : categorical_split(pos, f, parent_h, total);
      if (c) cands.push_back(std::move(*c));
    }
    if (cands.empty()) return std::nullopt;
    // only splits with at least average gain compete on gain ratio
    double avg = 0;
    for (const auto& c : cands) avg += c.gain;
    avg /= static_cast<double>(cands.size());
    std::optional<Candidate> best;
    for (auto& c : cands) {
      if (c.gain < avg - 1e-12) continue;
      if (!best || c.ratio > best->ratio) best = std::move(c);
    }
    return best;
  }

  std::optional<Candidate> numeric_split(const std::vector<std::size_t>& pos, std::size_t f, double parent_h,
                                         double total) {
    std::vector<std::size_t> order = pos;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return value(a, f) < value(b, f); });
    const auto min_leaf = opt_.params.min_leaf;
    double l0 = 0, l1 = 0;
    double r0 = 0, r1 = 0;
    for (auto p : order) (m_.y[rows_[p]] == 1 ? r1 : r0) += w_[p];
    std::optional<Candidate> best;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const auto p = order[i];
      if (m_.y[rows_[p]] == 1) {
        l1 += w_[p];
        r1 -= w_[p];
      } else {
        l0 += w_[p];
        r0 -= w_[p];
      }
      const double v = value(p, f), next = value(order[i + 1], f);
      if (v == next) continue;
      if (i + 1 < min_leaf || order.size() - i - 1 < min_leaf) continue;
      const double wl = l0 + l1, wr = std::max(r0, 0.0) + std::max(r1, 0.0);
      const double gain = parent_h - (wl / total) * entropy2(l0, l1) - (wr / total) * entropy2(std::max(r0, 0.0), std::max(r1, 0.0));
      const double split_info = entropy2(wl, wr);
      if (split_info <= 0) continue;
      const double ratio = gain / split_info;
      if (!best || ratio > best->ratio) {
        double thr = v + (next - v) / 2;
        if (thr >= next) thr = v;
        best = Candidate{f, true, thr, {}, gain, ratio};
      }
    }
    return best;
  }

  std::optional<Candidate> categorical_split(const std::vector<std::size_t>& pos, std::size_t f, double parent_h,
                                             double total) {
    struct Group {
      double w0 = 0, w1 = 0;
      std::size_t n = 0;
    };
    std::map<double, Group> groups;
    for (auto p : pos) {
      auto& g = groups[value(p, f)];
      (m_.y[rows_[p]] == 1 ? g.w1 : g.w0) += w_[p];
      ++g.n;
    }
    if (groups.size() < 2) return std::nullopt;
    std::size_t big = 0;
    for (const auto& [v, g] : groups)
      if (g.n >= opt_.params.min_leaf) ++big;
    if (big < 2) return std::nullopt;
    Candidate c;
    c.feature = f;
    c.numeric = false;
    double cond = 0;
    std::vector<double> sizes;
    for (const auto& [v, g] : groups) {
      c.values.push_back(v);
      const double wg = g.w0 + g.w1;
      sizes.push_back(wg);
      cond += (wg / total) * entropy2(g.w0, g.w1);
    }
    c.gain = parent_h - cond;
    const double split_info = entropy_of(sizes);
    if (split_info <= 0) return std::nullopt;
    c.ratio = c.gain / split_info;
    return c;
  }

  /// Returns the estimated errors of the (possibly collapsed) subtree.
  double prune(int id) {
    auto& node = tree_.nodes[id];
    const double n = node.weight;
    const double pos = node.weight_positive;
    const double leaf_err = pos >= n - pos ? n - pos : pos;
    const double leaf_est = leaf_err + added_errors(n, leaf_err);
    if (node.feature < 0) return leaf_est;
    double subtree_est = 0;
    const auto children = node.children;
    for (int c : children) subtree_est += prune(c);
    if (leaf_est <= subtree_est + 0.1) {
      auto& collapsed = tree_.nodes[id];
      collapsed.feature = -1;
      collapsed.children.clear();
      collapsed.branch_values.clear();
      collapsed.threshold = 0;
      collapsed.numeric_split = true;
      return leaf_est;
    }
    return subtree_est;
  }

  void compact() {
    TreeModel out;
    std::function<int(int)> copy = [&](int id) {
      const int nid = static_cast<int>(out.nodes.size());
      out.nodes.push_back(tree_.nodes[id]);
      std::vector<int> kids;
      for (int c : tree_.nodes[id].children) kids.push_back(copy(c));
      out.nodes[nid].children = std::move(kids);
      return nid;
    };
    copy(0);
    tree_ = std::move(out);
  }

  const TrainMatrix& m_;
  std::span<const std::size_t> rows_;
  std::span<const double> w_;
  const TreeGrowOptions& opt_;
  TreeModel tree_;
};

} // namespace

std::size_t TreeModel::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return n.feature < 0; }));
}

std::size_t TreeModel::depth() const {
  std::function<std::size_t(int)> rec = [&](int id) -> std::size_t {
    std::size_t d = 0;
    for (int c : nodes[id].children) d = std::max(d, 1 + rec(c));
    return d;
  };
  return nodes.empty() ? 0 : rec(0);
}

TreeModel grow_tree(const TrainMatrix& m, std::span<const std::size_t> rows, std::span<const double> weights,
                    const TreeGrowOptions& options) {
  if (rows.empty()) throw DataError("tree: empty training set");
  if (rows.size() != weights.size()) throw ConfigError("tree: rows and weights differ in length");
  return TreeBuilder(m, rows, weights, options).build();
}

double tree_p_positive(const TreeModel& tree, std::span<const double> x) {
  int id = 0;
  while (true) {
    const auto& node = tree.nodes[id];
    if (node.feature < 0) return node.p_positive;
    const double v = x[static_cast<std::size_t>(node.feature)];
    if (node.numeric_split) {
      id = node.children[v <= node.threshold ? 0 : 1];
    } else {
      auto it = std::find(node.branch_values.begin(), node.branch_values.end(), v);
      if (it == node.branch_values.end()) return node.p_positive;
      id = node.children[static_cast<std::size_t>(it - node.branch_values.begin())];
    }
  }
}

TrainedModel train_tree(const Dataset& d, const TreeParams& hp, std::optional<ScalingParams> scaling) {
  ModelSpec spec{hp};
  validate(spec);
  const auto m = make_matrix(d, scaling);
  std::vector<std::size_t> rows(m.rows);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::vector<double> w(m.rows, 1.0);
  TreeGrowOptions opt{hp, 0, nullptr};
  TrainedModel model{grow_tree(m, rows, w, opt), d.schema, std::move(scaling), {spec, d.size(), {}}};
  return model;
}

} // namespace cad
