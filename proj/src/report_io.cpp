#include "cad/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cad/errors.hpp"

namespace cad {

std::string format_fixed(std::optional<double> v, int decimals) {
  if (!v || !std::isfinite(*v)) return "NA";
  double x = *v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  std::string s = buf;
  // avoid "-0.0000"
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

namespace {

std::string num(double v) { return format_fixed(v, 4); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

} // namespace

std::string summary_csv(const SummaryTable& table) {
  std::ostringstream os;
  os << "feature,count,mean,std,min,q25,median,q75,max\n";
  for (const auto& r : table.rows)
    os << csv_field(r.name) << ',' << r.count << ',' << num(r.mean) << ',' << format_fixed(r.std, 4) << ','
       << num(r.min) << ',' << num(r.q25) << ',' << num(r.median) << ',' << num(r.q75) << ',' << num(r.max) << '\n';
  return os.str();
}

std::string correlation_csv(const CorrelationMatrix& m) {
  std::ostringstream os;
  os << "feature";
  for (const auto& n : m.names) os << ',' << csv_field(n);
  os << '\n';
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    os << csv_field(m.names[i]);
    for (std::size_t j = 0; j < m.names.size(); ++j) os << ',' << format_fixed(m.at(i, j), 4);
    os << '\n';
  }
  return os.str();
}

std::string outliers_csv(const OutlierReport& report) {
  std::ostringstream os;
  os << "feature,q1,q3,outlier_pct,extreme_pct\n";
  for (const auto& f : report.features)
    os << csv_field(f.name) << ',' << num(f.q1) << ',' << num(f.q3) << ',' << format_fixed(f.outlier_pct, 2) << ','
       << format_fixed(f.extreme_pct, 2) << '\n';
  return os.str();
}

std::string ranking_csv(const FeatureRanking& ranking) {
  std::ostringstream os;
  os << "rank,feature,gain_ratio,info_gain\n";
  for (std::size_t i = 0; i < ranking.ranked.size(); ++i) {
    const auto& s = ranking.ranked[i];
    os << i + 1 << ',' << csv_field(s.feature) << ',' << format_fixed(s.gain_ratio, 4) << ',' << num(s.info_gain)
       << '\n';
  }
  return os.str();
}

std::string report_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream os;
  os << "model,accuracy,precision,recall,f_measure,mcc,roc_area,kappa,rmse\n";
  for (const auto& row : rows) {
    os << csv_field(row.name);
    if (!row.result) {
      os << ",NA,NA,NA,NA,NA,NA,NA,NA\n";
      continue;
    }
    const auto& m = row.result->metrics;
    std::optional<double> acc_pct;
    if (m.accuracy) acc_pct = *m.accuracy * 100.0;
    os << ',' << format_fixed(acc_pct, 2) << ',' << format_fixed(m.precision, 4) << ',' << format_fixed(m.recall, 4)
       << ',' << format_fixed(m.f_measure, 4) << ',' << format_fixed(m.mcc, 4) << ',' << format_fixed(m.roc_auc, 4)
       << ',' << format_fixed(m.kappa, 4) << ',' << format_fixed(m.rmse, 4) << '\n';
  }
  return os.str();
}

std::string roc_csv(const std::vector<RocPoint>& points) {
  std::ostringstream os;
  os << "fpr,tpr,threshold\n";
  for (const auto& p : points)
    os << format_fixed(p.fpr, 6) << ',' << format_fixed(p.tpr, 6) << ','
       << (std::isinf(p.threshold) ? std::string("inf") : format_fixed(p.threshold, 6)) << '\n';
  return os.str();
}

std::string roc_svg(const std::vector<BenchmarkRow>& rows) {
  static const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  constexpr double size = 400, pad = 40;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * pad + 180 << "\" height=\""
     << size + 2 * pad << "\">\n";
  os << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << size << "\" height=\"" << size
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << pad + size << "\" x2=\"" << pad + size << "\" y2=\"" << pad
     << "\" stroke=\"#bbb\" stroke-dasharray=\"4 4\"/>\n";
  os << "<text x=\"" << pad + size / 2 << "\" y=\"" << size + 2 * pad - 8
     << "\" text-anchor=\"middle\" font-size=\"12\">False positive rate</text>\n";
  os << "<text x=\"12\" y=\"" << pad + size / 2 << "\" font-size=\"12\" transform=\"rotate(-90 12 "
     << pad + size / 2 << ")\" text-anchor=\"middle\">True positive rate</text>\n";
  std::size_t c = 0;
  for (const auto& row : rows) {
    if (!row.result || row.result->metrics.roc_points.empty()) continue;
    const char* color = colors[c % std::size(colors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& p : row.result->metrics.roc_points) {
      if (!first) os << ' ';
      first = false;
      os << format_fixed(pad + p.fpr * size, 2) << ',' << format_fixed(pad + (1 - p.tpr) * size, 2);
    }
    os << "\"/>\n";
    os << "<text x=\"" << pad + size + 12 << "\" y=\"" << pad + 14 + 16.0 * static_cast<double>(c)
       << "\" font-size=\"12\" fill=\"" << color << "\">" << row.name << " ("
       << format_fixed(row.result->metrics.roc_auc, 3) << ")</text>\n";
    ++c;
  }
  os << "</svg>\n";
  return os.str();
}

std::string predictions_csv(const CvResult& result) {
  std::ostringstream os;
  os << "record,fold,truth,predicted,p_positive\n";
  for (const auto& p : result.predictions)
    os << p.record << ',' << p.fold << ',' << p.truth << ',' << p.predicted << ',' << format_fixed(p.p_positive, 6)
       << '\n';
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("write failed for '" + path + "'");
}

} // namespace cad
