#include "cad/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "cad/errors.hpp"

namespace cad {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::optional<double> parse_plain_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const char* begin = text.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + text.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Y/N and yes/no map to 1/0; anything else must be numeric.
std::optional<double> parse_cell(const std::string& text) {
  const auto t = lower(text);
  if (t == "y" || t == "yes") return 1.0;
  if (t == "n" || t == "no") return 0.0;
  return parse_plain_number(text);
}

std::optional<int> parse_label(const std::string& text) {
  const auto t = lower(text);
  if (t == "cad" || t == "1") return 1;
  if (t == "normal" || t == "0") return 0;
  return std::nullopt;
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  // quoted fields may span lines
  auto quotes = std::count(line.begin(), line.end(), '"');
  while (quotes % 2 == 1) {
    std::string more;
    if (!std::getline(in, more)) break;
    line += "\n" + more;
    quotes += std::count(more.begin(), more.end(), '"');
  }
  return true;
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

RawTable read_table(std::istream& in) {
  RawTable t;
  std::string line;
  std::size_t line_no = 0;
  while (read_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    for (auto& c : cells) c = trim(c);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    t.rows.push_back(std::move(cells));
    t.line_numbers.push_back(line_no);
  }
  if (t.header.empty()) throw DataError("empty file: no header row");
  if (t.rows.empty()) throw DataError("empty dataset");
  return t;
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header, const std::vector<std::string>& candidates) {
  for (const auto& cand : candidates)
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == cand) return i;
  for (const auto& cand : candidates)
    for (std::size_t i = 0; i < header.size(); ++i)
      if (lower(header[i]) == lower(cand)) return i;
  return std::nullopt;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string format_double(double v) {
  char buf[40];
  for (int prec : {15, 16, 17}) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::array<std::size_t, 2> Dataset::class_counts() const {
  std::array<std::size_t, 2> counts{0, 0};
  for (const auto& r : records)
    if (r.label) ++counts[*r.label == 1 ? 1 : 0];
  return counts;
}

std::vector<double> Dataset::column(std::size_t feature) const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.values.at(feature));
  return out;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.label.value_or(-1));
  return out;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out{schema, {}, provenance};
  out.records.reserve(indices.size());
  for (auto i : indices) out.records.push_back(records.at(i));
  return out;
}

Dataset Dataset::project(const std::vector<std::string>& names) const {
  Dataset out{schema.project(names), {}, provenance + " | project(" + std::to_string(names.size()) + ")"};
  std::vector<std::size_t> idx;
  for (const auto& n : names) idx.push_back(*schema.index_of(n));
  out.records.reserve(records.size());
  for (const auto& r : records) {
    PatientRecord p;
    p.label = r.label;
    p.out_of_range = r.out_of_range;
    p.origin = r.origin;
    p.values.reserve(idx.size());
    for (auto i : idx) p.values.push_back(r.values[i]);
    out.records.push_back(std::move(p));
  }
  return out;
}

Dataset parse_dataset(std::istream& in, const FeatureSchema& schema, const LoadOptions& options,
                      const std::string& source_name) {
  const RawTable table = read_table(in);

  // Resolve each schema feature to a source column.
  std::vector<std::size_t> column_of(schema.size());
  for (std::size_t f = 0; f < schema.size(); ++f) {
    const auto& spec = schema.features[f];
    std::vector<std::string> candidates;
    for (const auto& [src, dst] : options.alias_map)
      if (dst == spec.name) candidates.push_back(src);
    candidates.push_back(spec.name);
    candidates.insert(candidates.end(), spec.aliases.begin(), spec.aliases.end());
    auto col = find_column(table.header, candidates);
    if (!col) throw DataError("missing required column '" + spec.name + "'");
    column_of[f] = *col;
  }
  std::vector<std::string> label_candidates{schema.label_name};
  label_candidates.insert(label_candidates.end(), schema.label_aliases.begin(), schema.label_aliases.end());
  auto label_col = find_column(table.header, label_candidates);
  if (!label_col && options.require_label) throw DataError("missing required column '" + schema.label_name + "'");

  Dataset d{schema, {}, source_name};
  d.records.reserve(table.rows.size());
  std::vector<std::pair<std::size_t, std::size_t>> missing;
  std::size_t flagged = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto line = table.line_numbers[r];
    auto cell_at = [&](std::size_t col) -> std::string { return col < row.size() ? row[col] : std::string{}; };
    PatientRecord rec;
    rec.values.resize(schema.size());
    for (std::size_t f = 0; f < schema.size(); ++f) {
      const auto col = column_of[f];
      const auto text = cell_at(col);
      if (text.empty() || text == "?" || lower(text) == "na") {
        if (!options.impute_missing)
          throw DataError("missing value at line " + std::to_string(line) + ", column '" + table.header[col] + "'");
        rec.values[f] = std::nan("");
        missing.emplace_back(r, f);
        continue;
      }
      auto v = parse_cell(text);
      if (!v)
        throw DataError("unparseable cell at line " + std::to_string(line) + ", column '" + table.header[col] +
                        "': '" + text + "'");
      rec.values[f] = *v;
    }
    if (label_col) {
      const auto text = cell_at(*label_col);
      auto lab = parse_label(text);
      if (!lab)
        throw DataError("unparseable label at line " + std::to_string(line) + ", column '" +
                        table.header[*label_col] + "': '" + text + "'");
      rec.label = *lab;
    }
    d.records.push_back(std::move(rec));
  }

  if (!missing.empty()) {
    for (std::size_t f = 0; f < schema.size(); ++f) {
      std::vector<double> present;
      for (const auto& rec : d.records)
        if (!std::isnan(rec.values[f])) present.push_back(rec.values[f]);
      if (present.empty()) throw DataError("column '" + schema.features[f].name + "' has no values to impute from");
      const double med = median_of(present);
      for (auto& rec : d.records)
        if (std::isnan(rec.values[f])) rec.values[f] = med;
    }
    d.provenance += " | imputed " + std::to_string(missing.size()) + " cells (median)";
  }

  for (auto& rec : d.records) {
    for (std::size_t f = 0; f < schema.size(); ++f)
      if (!schema.features[f].contains(rec.values[f])) rec.out_of_range = true;
    if (rec.out_of_range) ++flagged;
  }
  if (flagged) d.provenance += " | " + std::to_string(flagged) + " records flagged out-of-range";
  return d;
}

Dataset load_dataset(const std::string& path, const FeatureSchema& schema, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  return parse_dataset(in, schema, options, path);
}

Dataset parse_raw_dataset(std::istream& in, const std::string& label_column, const std::string& source_name) {
  const RawTable table = read_table(in);
  auto label_col = find_column(table.header, {label_column});
  if (!label_col) throw DataError("missing required column '" + label_column + "'");

  Dataset d;
  d.schema.features.clear();
  d.schema.label_name = table.header[*label_col];
  d.provenance = source_name + " | pass-through";
  d.records.resize(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size())
      throw DataError("line " + std::to_string(table.line_numbers[r]) + ": expected " +
                      std::to_string(table.header.size()) + " cells, got " + std::to_string(row.size()));
    auto lab = parse_label(row[*label_col]);
    if (!lab)
      throw DataError("unparseable label at line " + std::to_string(table.line_numbers[r]) + ": '" +
                      row[*label_col] + "'");
    d.records[r].label = *lab;
  }

  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == *label_col) continue;
    FeatureSpec spec;
    spec.name = table.header[c];
    std::vector<std::optional<double>> parsed;
    bool all_numeric = true;
    for (const auto& row : table.rows) {
      if (row[c].empty()) throw DataError("missing value in column '" + spec.name + "'");
      parsed.push_back(parse_cell(row[c]));
      if (!parsed.back()) all_numeric = false;
    }
    std::vector<double> values;
    if (all_numeric) {
      std::set<double> distinct;
      for (auto& p : parsed) {
        values.push_back(*p);
        distinct.insert(*p);
      }
      if (std::all_of(distinct.begin(), distinct.end(), [](double v) { return v == 0.0 || v == 1.0; })) {
        spec.kind = FeatureKind::binary;
        spec.categories = {0, 1};
      } else {
        spec.kind = FeatureKind::numeric;
      }
    } else {
      std::set<std::string> distinct;
      for (const auto& row : table.rows) distinct.insert(row[c]);
      std::vector<std::string> order(distinct.begin(), distinct.end());
      spec.kind = FeatureKind::categorical;
      for (std::size_t k = 0; k < order.size(); ++k) spec.categories.push_back(static_cast<double>(k));
      std::string mapping;
      for (std::size_t k = 0; k < order.size(); ++k) mapping += (k ? ";" : "") + order[k] + "=" + std::to_string(k);
      spec.unit = mapping;
      for (const auto& row : table.rows)
        values.push_back(static_cast<double>(std::find(order.begin(), order.end(), row[c]) - order.begin()));
    }
    for (std::size_t r = 0; r < values.size(); ++r) d.records[r].values.push_back(values[r]);
    d.schema.features.push_back(std::move(spec));
  }
  return d;
}

Dataset load_raw_dataset(const std::string& path, const std::string& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  return parse_raw_dataset(in, label_column, path);
}

void write_csv(const Dataset& d, std::ostream& out) {
  for (const auto& f : d.schema.features) {
    if (f.name.find_first_of(",\"") != std::string::npos) throw DataError("feature name needs quoting: " + f.name);
    out << f.name << ',';
  }
  out << d.schema.label_name << '\n';
  for (const auto& r : d.records) {
    for (double v : r.values) out << format_double(v) << ',';
    if (r.label) out << *r.label;
    out << '\n';
  }
}

void write_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_csv(d, out);
}

void validate_record(const FeatureSchema& schema, const PatientRecord& record) {
  if (record.values.size() != schema.size())
    throw DataError("record has " + std::to_string(record.values.size()) + " values, schema expects " +
                    std::to_string(schema.size()));
  for (std::size_t f = 0; f < schema.size(); ++f) {
    const auto& spec = schema.features[f];
    const double v = record.values[f];
    if (std::isnan(v)) throw DataError("missing feature '" + spec.name + "'");
    if (!record.out_of_range && !spec.contains(v))
      throw DataError("feature '" + spec.name + "' value " + format_double(v) + " outside valid range " +
                      spec.range_text());
  }
}

PatientRecord record_from_named(const FeatureSchema& schema, const std::map<std::string, double>& values,
                                bool allow_out_of_range) {
  PatientRecord rec;
  std::vector<std::string> missing;
  for (const auto& spec : schema.features) {
    auto it = values.find(spec.name);
    if (it == values.end()) {
      missing.push_back(spec.name);
      rec.values.push_back(std::nan(""));
    } else {
      rec.values.push_back(it->second);
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing feature";
    msg += missing.size() > 1 ? "s " : " ";
    for (std::size_t i = 0; i < missing.size(); ++i) msg += (i ? ", '" : "'") + missing[i] + "'";
    throw DataError(msg);
  }
  rec.out_of_range = allow_out_of_range;
  validate_record(schema, rec);
  return rec;
}

} // namespace cad
