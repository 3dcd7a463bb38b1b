#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cad/schema.hpp"

namespace cad {

/// Where a SMOTE record came from: indices into the dataset it was grown from.
struct SyntheticOrigin {
  std::size_t parent = 0;
  std::size_t neighbor = 0;
  bool operator==(const SyntheticOrigin&) const = default;
};

struct PatientRecord {
  /// One value per schema feature, in schema order. NaN marks a missing value.
  std::vector<double> values;
  std::optional<int> label;
  /// Set when some value lies outside its schema range and the caller accepted it.
  bool out_of_range = false;
  std::optional<SyntheticOrigin> origin;

  bool operator==(const PatientRecord&) const = default;
};

struct Dataset {
  FeatureSchema schema;
  std::vector<PatientRecord> records;
  std::string provenance;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  /// Counts of label 0 and label 1. Unlabelled records are ignored.
  std::array<std::size_t, 2> class_counts() const;
  std::vector<double> column(std::size_t feature) const;
  std::vector<int> labels() const;

  Dataset subset(const std::vector<std::size_t>& indices) const;
  /// Keep only the named features, in the given order.
  Dataset project(const std::vector<std::string>& names) const;
};

struct LoadOptions {
  /// Source column name -> schema feature name, consulted before schema aliases.
  std::map<std::string, std::string> alias_map;
  bool require_label = true;
  /// Replace missing numeric cells with the column median instead of failing.
  bool impute_missing = false;
};

/// Reads a comma-separated file whose header names the schema features
/// (directly, via schema aliases, or via alias_map). Y/N cells map to 1/0 and
/// label text Cad/Normal to 1/0. Out-of-range values are kept and flagged.
Dataset load_dataset(const std::string& path, const FeatureSchema& schema, const LoadOptions& options = {});
Dataset parse_dataset(std::istream& in, const FeatureSchema& schema, const LoadOptions& options = {},
                      const std::string& source_name = "<stream>");

/// Loads every column of a labelled CSV, inferring kinds: 0/1 or Y/N columns
/// are binary, other numeric columns numeric, remaining text columns categorical
/// (codes assigned in sorted order of the distinct strings).
Dataset load_raw_dataset(const std::string& path, const std::string& label_column = "Cath");
Dataset parse_raw_dataset(std::istream& in, const std::string& label_column = "Cath",
                          const std::string& source_name = "<stream>");

void write_csv(const Dataset& d, std::ostream& out);
void write_csv(const Dataset& d, const std::string& path);

/// Builds a record from name -> value pairs. Throws DataError listing missing
/// features. Out-of-range values throw unless allow_out_of_range is set.
PatientRecord record_from_named(const FeatureSchema& schema, const std::map<std::string, double>& values,
                                bool allow_out_of_range = false);

/// Checks presence and ranges; throws DataError naming the first offending feature.
void validate_record(const FeatureSchema& schema, const PatientRecord& record);

/// Parses one CSV line (RFC 4180 quoting).
std::vector<std::string> split_csv_line(const std::string& line);

/// Shortest round-trip decimal text for a double ("%.17g" fallback).
std::string format_double(double v);

} // namespace cad
