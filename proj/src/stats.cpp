#include "cad/stats.hpp"

#include <algorithm>
#include <cmath>

#include "cad/errors.hpp"

namespace cad {

double quantile_sorted(std::span<const double> sorted, double p, QuantileMethod method) {
  const auto n = sorted.size();
  if (n == 0) throw DataError("quantile of empty column");
  if (n == 1) return sorted[0];
  double h = 0;
  if (method == QuantileMethod::linear) {
    h = (static_cast<double>(n) - 1.0) * p;
  } else {
    h = std::clamp((static_cast<double>(n) + 1.0) * p, 1.0, static_cast<double>(n)) - 1.0;
  }
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, n - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double mean_of(std::span<const double> v) {
  // sorted summation keeps the result independent of record order
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  double sum = 0;
  for (double x : s) sum += x;
  return sum / static_cast<double>(s.size());
}

double sample_std(std::span<const double> v) {
  const double m = mean_of(v);
  std::vector<double> sq;
  sq.reserve(v.size());
  for (double x : v) sq.push_back((x - m) * (x - m));
  std::sort(sq.begin(), sq.end());
  double ss = 0;
  for (double x : sq) ss += x;
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

const SummaryRow* SummaryTable::find(std::string_view name) const {
  for (const auto& r : rows)
    if (r.name == name) return &r;
  return nullptr;
}

namespace {

SummaryRow summarize_column(std::string name, std::vector<double> col, QuantileMethod method) {
  SummaryRow row;
  row.name = std::move(name);
  row.count = col.size();
  std::sort(col.begin(), col.end());
  row.mean = mean_of(col);
  if (col.size() >= 2) row.std = sample_std(col);
  row.min = col.front();
  row.max = col.back();
  row.q25 = quantile_sorted(col, 0.25, method);
  row.median = quantile_sorted(col, 0.5, method);
  row.q75 = quantile_sorted(col, 0.75, method);
  return row;
}

} // namespace

SummaryTable summarize(const Dataset& d, QuantileMethod method) {
  if (d.empty()) throw DataError("summarize: empty dataset");
  SummaryTable t;
  for (std::size_t f = 0; f < d.schema.size(); ++f)
    t.rows.push_back(summarize_column(d.schema.features[f].name, d.column(f), method));
  std::vector<double> labels;
  for (const auto& r : d.records)
    if (r.label) labels.push_back(*r.label);
  if (!labels.empty()) t.rows.push_back(summarize_column(d.schema.label_name, std::move(labels), method));
  return t;
}

std::optional<double> CorrelationMatrix::at(std::string_view a, std::string_view b) const {
  auto ia = std::find(names.begin(), names.end(), a);
  auto ib = std::find(names.begin(), names.end(), b);
  if (ia == names.end() || ib == names.end()) throw DataError("correlation: unknown column");
  return at(static_cast<std::size_t>(ia - names.begin()), static_cast<std::size_t>(ib - names.begin()));
}

CorrelationMatrix correlation_matrix(const Dataset& d) {
  if (d.size() < 2) throw DataError("correlation_matrix: need at least 2 records");
  CorrelationMatrix m;
  std::vector<std::vector<double>> cols;
  for (std::size_t f = 0; f < d.schema.size(); ++f) {
    m.names.push_back(d.schema.features[f].name);
    cols.push_back(d.column(f));
  }
  {
    std::vector<double> labels;
    for (const auto& r : d.records) labels.push_back(r.label ? *r.label : std::nan(""));
    if (std::none_of(labels.begin(), labels.end(), [](double x) { return std::isnan(x); })) {
      m.names.push_back(d.schema.label_name);
      cols.push_back(std::move(labels));
    }
  }
  const auto p = cols.size();
  // center once
  std::vector<double> norms(p);
  for (auto& c : cols) {
    const double mu = mean_of(c);
    for (auto& x : c) x -= mu;
  }
  for (std::size_t i = 0; i < p; ++i) {
    double ss = 0;
    for (double x : cols[i]) ss += x * x;
    norms[i] = std::sqrt(ss);
  }
  m.values.assign(p * p, std::nullopt);
  for (std::size_t i = 0; i < p; ++i) {
    if (norms[i] == 0) continue;
    m.values[i * p + i] = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) {
      if (norms[j] == 0) continue;
      double cross = 0;
      for (std::size_t r = 0; r < cols[i].size(); ++r) cross += cols[i][r] * cols[j][r];
      const double rho = std::clamp(cross / (norms[i] * norms[j]), -1.0, 1.0);
      m.values[i * p + j] = rho;
      m.values[j * p + i] = rho;
    }
  }
  return m;
}

} // namespace cad
