#include "cad/schema.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cad/errors.hpp"

namespace cad {

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& text, std::size_t line_no) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw DataError("schema line " + std::to_string(line_no) + ": bad number '" + text + "'");
  }
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

FeatureSpec numeric(std::string name, std::string unit, double lo, double hi,
                    std::vector<std::string> aliases = {}) {
  FeatureSpec f;
  f.name = std::move(name);
  f.kind = FeatureKind::numeric;
  f.unit = std::move(unit);
  f.lo = lo;
  f.hi = hi;
  f.aliases = std::move(aliases);
  return f;
}

FeatureSpec coded(std::string name, FeatureKind kind, std::vector<double> codes,
                  std::vector<std::string> aliases = {}) {
  FeatureSpec f;
  f.name = std::move(name);
  f.kind = kind;
  f.categories = std::move(codes);
  f.aliases = std::move(aliases);
  return f;
}

} // namespace

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
  case FeatureKind::numeric: return "numeric";
  case FeatureKind::binary: return "binary";
  case FeatureKind::ordinal: return "ordinal";
  case FeatureKind::categorical: return "categorical";
  }
  return "numeric";
}

FeatureKind feature_kind_from_string(std::string_view text) {
  if (text == "numeric") return FeatureKind::numeric;
  if (text == "binary") return FeatureKind::binary;
  if (text == "ordinal") return FeatureKind::ordinal;
  if (text == "categorical") return FeatureKind::categorical;
  throw DataError("unknown feature kind '" + std::string(text) + "'");
}

bool FeatureSpec::contains(double v) const {
  if (std::isnan(v)) return false;
  if (kind == FeatureKind::numeric) return v >= lo && v <= hi;
  if (categories.empty()) return true;
  for (double c : categories)
    if (c == v) return true;
  return false;
}

std::string FeatureSpec::range_text() const {
  if (kind == FeatureKind::numeric) {
    if (std::isinf(lo) && std::isinf(hi)) return "unbounded";
    return format_number(lo) + "-" + format_number(hi);
  }
  if (categories.empty()) return "any";
  std::string s = "{";
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (i) s += ",";
    s += format_number(categories[i]);
  }
  return s + "}";
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < features.size(); ++i)
    if (features[i].name == name) return i;
  return std::nullopt;
}

std::vector<std::string> FeatureSchema::names() const {
  std::vector<std::string> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(f.name);
  return out;
}

FeatureSchema FeatureSchema::project(const std::vector<std::string>& wanted) const {
  FeatureSchema out = *this;
  out.features.clear();
  for (const auto& name : wanted) {
    auto idx = index_of(name);
    if (!idx) throw DataError("unknown feature '" + name + "'");
    out.features.push_back(features[*idx]);
  }
  return out;
}

FeatureSchema cad12_schema() {
  const std::vector<double> yn{0, 1};
  FeatureSchema s;
  s.features = {
      numeric("Age", "years", 30, 86),
      coded("DM", FeatureKind::binary, yn, {"Diabetes Mellitus", "Diabetes Milletus"}),
      coded("HTN", FeatureKind::binary, yn, {"Hypertension"}),
      numeric("BP", "mmHg", 90, 190, {"Blood Pressure"}),
      coded("TypicalChestPain", FeatureKind::binary, yn, {"Typical Chest Pain", "Typical_Chest_Pain"}),
      coded("Atypical", FeatureKind::binary, yn),
      coded("Nonanginal", FeatureKind::binary, yn),
      coded("Tinversion", FeatureKind::binary, yn, {"T inversion", "T-inversion"}),
      // 62-100 is the normal clinical band; observed data reaches 400.
      numeric("FBS", "mg/dl", 62, 400, {"Fasting Blood Sugar"}),
      numeric("ESR", "mm/h", 1, 90, {"Erythrocyte Sed Rate"}),
      numeric("K", "mEq/l", 3.0, 6.6, {"Potassium"}),
      numeric("EF-TTE", "%", 15, 60, {"EF TTE", "EF_TTE", "Ejection Fraction"}),
      coded("RegionRWMA", FeatureKind::ordinal, {0, 1, 2, 3, 4}, {"Region RWMA", "Region_RWMA"}),
  };
  return s;
}

FeatureSchema parse_schema(std::string_view text) {
  FeatureSchema s;
  s.features.clear();
  bool saw_version = false;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto cols = split(line, '|');
    for (auto& c : cols) c = trim(c);
    const auto& tag = cols[0];
    if (tag == "version") {
      if (cols.size() < 2) throw DataError("schema line " + std::to_string(line_no) + ": missing version");
      int v = static_cast<int>(parse_number(cols[1], line_no));
      if (v > kSchemaFileVersion)
        throw DataError("schema version " + std::to_string(v) + " is newer than supported " +
                        std::to_string(kSchemaFileVersion));
      saw_version = true;
    } else if (tag == "label") {
      if (cols.size() < 4) throw DataError("schema line " + std::to_string(line_no) + ": label needs name|positive|negative");
      s.label_name = cols[1];
      s.positive_label_meaning = cols[2];
      s.negative_label_meaning = cols[3];
      s.label_aliases.clear();
      if (cols.size() > 4 && !cols[4].empty())
        for (auto& a : split(cols[4], ';')) s.label_aliases.push_back(trim(a));
    } else if (tag == "feature") {
      if (cols.size() < 5) throw DataError("schema line " + std::to_string(line_no) + ": feature needs name|kind|unit|range");
      FeatureSpec f;
      f.name = cols[1];
      f.kind = feature_kind_from_string(cols[2]);
      f.unit = cols[3];
      const auto& range = cols[4];
      if (f.kind == FeatureKind::numeric) {
        auto dots = range.find("..");
        if (dots == std::string::npos)
          throw DataError("schema line " + std::to_string(line_no) + ": numeric range must be lo..hi");
        f.lo = parse_number(trim(range.substr(0, dots)), line_no);
        f.hi = parse_number(trim(range.substr(dots + 2)), line_no);
        if (f.lo > f.hi) throw DataError("schema line " + std::to_string(line_no) + ": lo > hi");
      } else if (!range.empty()) {
        for (auto& c : split(range, ',')) f.categories.push_back(parse_number(trim(c), line_no));
      }
      if (cols.size() > 5 && !cols[5].empty())
        for (auto& a : split(cols[5], ';')) f.aliases.push_back(trim(a));
      s.features.push_back(std::move(f));
    } else {
      throw DataError("schema line " + std::to_string(line_no) + ": unknown record '" + tag + "'");
    }
  }
  if (!saw_version) throw DataError("schema: missing version record");
  if (s.features.empty()) throw DataError("schema: no features");
  return s;
}

FeatureSchema load_schema_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open schema file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_schema(ss.str());
}

std::string format_schema(const FeatureSchema& s) {
  std::string out = "version|" + std::to_string(kSchemaFileVersion) + "\n";
  out += "label|" + s.label_name + "|" + s.positive_label_meaning + "|" + s.negative_label_meaning + "|";
  for (std::size_t i = 0; i < s.label_aliases.size(); ++i) out += (i ? ";" : "") + s.label_aliases[i];
  out += "\n";
  for (const auto& f : s.features) {
    out += "feature|" + f.name + "|" + std::string(to_string(f.kind)) + "|" + f.unit + "|";
    if (f.is_numeric()) {
      out += format_number(f.lo) + ".." + format_number(f.hi);
    } else {
      for (std::size_t i = 0; i < f.categories.size(); ++i) out += (i ? "," : "") + format_number(f.categories[i]);
    }
    out += "|";
    for (std::size_t i = 0; i < f.aliases.size(); ++i) out += (i ? ";" : "") + f.aliases[i];
    out += "\n";
  }
  return out;
}

nlohmann::json to_json(const FeatureSchema& s) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : s.features) {
    nlohmann::json j{{"name", f.name}, {"kind", to_string(f.kind)}, {"unit", f.unit}, {"aliases", f.aliases}};
    if (f.is_numeric()) {
      j["min"] = std::isinf(f.lo) ? nlohmann::json(nullptr) : nlohmann::json(f.lo);
      j["max"] = std::isinf(f.hi) ? nlohmann::json(nullptr) : nlohmann::json(f.hi);
    } else {
      j["categories"] = f.categories;
    }
    features.push_back(std::move(j));
  }
  return {{"features", features},
          {"label_name", s.label_name},
          {"positive_label_meaning", s.positive_label_meaning},
          {"negative_label_meaning", s.negative_label_meaning},
          {"label_aliases", s.label_aliases}};
}

FeatureSchema schema_from_json(const nlohmann::json& j) {
  FeatureSchema s;
  s.features.clear();
  for (const auto& jf : j.at("features")) {
    FeatureSpec f;
    f.name = jf.at("name").get<std::string>();
    f.kind = feature_kind_from_string(jf.at("kind").get<std::string>());
    f.unit = jf.value("unit", "");
    f.aliases = jf.value("aliases", std::vector<std::string>{});
    if (f.is_numeric()) {
      const auto inf = std::numeric_limits<double>::infinity();
      f.lo = jf.at("min").is_null() ? -inf : jf.at("min").get<double>();
      f.hi = jf.at("max").is_null() ? inf : jf.at("max").get<double>();
    } else {
      f.categories = jf.value("categories", std::vector<double>{});
    }
    s.features.push_back(std::move(f));
  }
  s.label_name = j.at("label_name").get<std::string>();
  s.positive_label_meaning = j.at("positive_label_meaning").get<std::string>();
  s.negative_label_meaning = j.at("negative_label_meaning").get<std::string>();
  s.label_aliases = j.value("label_aliases", std::vector<std::string>{});
  return s;
}

} // namespace cad
