#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace cad {

enum class FeatureKind { numeric, binary, ordinal, categorical };

std::string_view to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(std::string_view text);

/// One predictor column. Numeric features carry a closed interval; the other
/// kinds carry their admissible category codes (empty = unconstrained, used
/// by inferred pass-through schemas).
struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::string unit;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  std::vector<double> categories;
  std::vector<std::string> aliases;

  bool is_numeric() const { return kind == FeatureKind::numeric; }
  bool contains(double v) const;
  /// Human-readable valid range, e.g. "90-190" or "{0,1,2,3,4}".
  std::string range_text() const;

  bool operator==(const FeatureSpec&) const = default;
};

struct FeatureSchema {
  std::vector<FeatureSpec> features;
  std::string label_name = "Cath";
  std::string positive_label_meaning = "CAD";
  std::string negative_label_meaning = "Normal";
  std::vector<std::string> label_aliases;

  std::size_t size() const { return features.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::vector<std::string> names() const;
  /// Subset schema in the given order. Throws DataError on unknown names.
  FeatureSchema project(const std::vector<std::string>& names) const;

  bool operator==(const FeatureSchema&) const = default;
};

inline constexpr int kSchemaFileVersion = 1;

/// The CAD schema: 13 columns, Age ... RegionRWMA (chest pain one-hot as three
/// binaries), label Cath with CAD = 1.
FeatureSchema cad12_schema();

/// Parses the pipe-separated schema text format (see data/schema.cad12).
FeatureSchema parse_schema(std::string_view text);
FeatureSchema load_schema_file(const std::string& path);
std::string format_schema(const FeatureSchema& schema);

nlohmann::json to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const nlohmann::json& j);

} // namespace cad
