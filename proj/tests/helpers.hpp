#pragma once

#include <string>
#include <vector>

#include "cad/dataset.hpp"

namespace cad::testing {

/// Unbounded features named x0, x1, ... with the given kinds (numeric when omitted).
inline Dataset table(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                     std::vector<FeatureKind> kinds = {}) {
  Dataset d;
  const auto cols = rows.empty() ? kinds.size() : rows.front().size();
  if (kinds.empty()) kinds.assign(cols, FeatureKind::numeric);
  for (std::size_t j = 0; j < cols; ++j) {
    FeatureSpec f;
    f.name = "x" + std::to_string(j);
    f.kind = kinds[j];
    d.schema.features.push_back(f);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    PatientRecord r;
    r.values = rows[i];
    if (i < labels.size()) r.label = labels[i];
    d.records.push_back(r);
  }
  d.provenance = "test";
  return d;
}

} // namespace cad::testing
