#pragma once

// Independent reference computations used by unit and acceptance tests.
// They share no code with the library.

#include <cmath>
#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace cad::oracle {

struct Tally {
  long tp = 0, fp = 0, fn = 0, tn = 0;
};

inline Tally tally(const std::vector<std::pair<int, int>>& truth_pred) {
  Tally t;
  for (auto [y, p] : truth_pred) {
    if (y == 1 && p == 1) ++t.tp;
    else if (y == 0 && p == 1) ++t.fp;
    else if (y == 1 && p == 0) ++t.fn;
    else ++t.tn;
  }
  return t;
}

/// Cohen's kappa from the full 2x2 agreement table.
inline double kappa(const Tally& t) {
  const double n = static_cast<double>(t.tp + t.fp + t.fn + t.tn);
  const double table[2][2] = {{double(t.tn), double(t.fp)}, {double(t.fn), double(t.tp)}};
  double po = 0, pe = 0;
  for (int i = 0; i < 2; ++i) {
    po += table[i][i] / n;
    double row = 0, col = 0;
    for (int j = 0; j < 2; ++j) {
      row += table[i][j];
      col += table[j][i];
    }
    pe += (row / n) * (col / n);
  }
  return (po - pe) / (1 - pe);
}

/// Pearson correlation between the truth and prediction indicator vectors.
inline double mcc(const Tally& t) {
  std::vector<double> y, p;
  auto push = [&](long count, double a, double b) {
    for (long i = 0; i < count; ++i) {
      y.push_back(a);
      p.push_back(b);
    }
  };
  push(t.tp, 1, 1);
  push(t.fp, 0, 1);
  push(t.fn, 1, 0);
  push(t.tn, 0, 0);
  const double n = static_cast<double>(y.size());
  double my = 0, mp = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    my += y[i];
    mp += p[i];
  }
  // divide once so a constant vector has exactly zero variance
  my /= n;
  mp /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sxy += (y[i] - my) * (p[i] - mp);
    sxx += (y[i] - my) * (y[i] - my);
    syy += (p[i] - mp) * (p[i] - mp);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Mann-Whitney statistic: P(score_pos > score_neg) + 0.5 P(tie).
inline double auc_pairs(const std::vector<std::pair<int, double>>& scored) {
  double wins = 0, pairs = 0;
  for (const auto& [ya, sa] : scored) {
    if (ya != 1) continue;
    for (const auto& [yb, sb] : scored) {
      if (yb != 0) continue;
      pairs += 1;
      if (sa > sb) wins += 1;
      else if (sa == sb) wins += 0.5;
    }
  }
  return wins / pairs;
}

inline double entropy_of_counts(const std::vector<double>& counts) {
  double n = 0;
  for (double c : counts) n += c;
  double h = 0;
  for (double c : counts)
    if (c > 0) h -= (c / n) * std::log2(c / n);
  return h;
}

/// Gain ratio by direct enumeration of the attribute x class contingency table.
/// Returns NaN when the attribute is constant.
inline double gain_ratio(const std::vector<int>& attr, const std::vector<int>& cls) {
  std::map<int, std::map<int, double>> table;
  std::map<int, double> class_counts, attr_counts;
  for (std::size_t i = 0; i < attr.size(); ++i) {
    table[attr[i]][cls[i]] += 1;
    class_counts[cls[i]] += 1;
    attr_counts[attr[i]] += 1;
  }
  auto values = [](const std::map<int, double>& m) {
    std::vector<double> v;
    for (auto& [k, c] : m) v.push_back(c);
    return v;
  };
  const double n = static_cast<double>(attr.size());
  double conditional = 0;
  for (auto& [a, row] : table) conditional += attr_counts[a] / n * entropy_of_counts(values(row));
  const double ig = entropy_of_counts(values(class_counts)) - conditional;
  const double h_attr = entropy_of_counts(values(attr_counts));
  return h_attr == 0 ? std::nan("") : ig / h_attr;
}

/// Central differences of f around w, one coordinate at a time.
inline double central_difference(const std::function<double()>& f, double& w, double h) {
  const double saved = w;
  w = saved + h;
  const double up = f();
  w = saved - h;
  const double down = f();
  w = saved;
  return (up - down) / (2 * h);
}

} // namespace cad::oracle
