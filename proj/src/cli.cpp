#include "cad/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cad/bundle.hpp"
#include "cad/errors.hpp"
#include "cad/feature_selection.hpp"
#include "cad/fixture.hpp"
#include "cad/preprocess.hpp"
#include "cad/report_io.hpp"
#include "cad/service.hpp"
#include "cad/stats.hpp"
#include "cad/validation.hpp"

namespace cad::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string data;
  bool fixture = false;
  std::uint64_t fixture_seed = 20240101;
  std::size_t fixture_records = 300;
  std::size_t fixture_noise = 0;
  std::string schema_file;
  bool raw = false;
  bool impute = false;
  std::string out = "out";
  std::uint64_t seed = 42;
  std::string mode = "default";
  std::size_t k = 10;
  std::size_t select_k = 12;
  std::size_t bins = 10;
  std::string model = "voting";
  bool no_smote = false;
  std::size_t smote_k = 5;
  bool tune = false;
  bool no_cv = false;
  double outlier_factor = 1.5;
  double extreme_factor = 3.0;
  std::string bundle;
  std::string input;
  bool allow_out_of_range = false;
  std::string bind;
  std::string cors_origin = "http://localhost:5173";
};

struct Input {
  Dataset data;
  json manifest_entry;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string hex8(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

FeatureSchema schema_for(const Options& o) {
  return o.schema_file.empty() ? cad12_schema() : load_schema_file(o.schema_file);
}

Input load_input(const Options& o) {
  if (o.fixture == !o.data.empty()) throw ConfigError("give exactly one of --data <csv> or --fixture");
  Input in;
  if (o.fixture) {
    in.data = make_fixture({o.fixture_records, 0.72, o.fixture_seed, o.fixture_noise});
    std::ostringstream csv;
    write_csv(in.data, csv);
    in.manifest_entry = {{"source", "fixture"},
                         {"records", o.fixture_records},
                         {"fixture_seed", o.fixture_seed},
                         {"noise_features", o.fixture_noise},
                         {"crc32", hex8(crc32_of(csv.str()))}};
    return in;
  }
  const auto bytes = read_file(o.data);
  in.data = o.raw ? load_raw_dataset(o.data) : load_dataset(o.data, schema_for(o), LoadOptions{{}, true, o.impute});
  in.manifest_entry = {{"source", o.data}, {"bytes", bytes.size()}, {"crc32", hex8(crc32_of(bytes))}};
  return in;
}

class Run {
public:
  Run(std::string command, const Options& o, std::vector<std::string> args)
      : command_(std::move(command)), opts_(o), args_(std::move(args)) {
    fs::create_directories(opts_.out);
  }

  std::string path(const std::string& name) const { return (fs::path(opts_.out) / name).string(); }

  void write(const std::string& name, const std::string& content) {
    write_text_file(path(name), content);
    outputs_.push_back(name);
  }

  void add_input(json entry) { inputs_.push_back(std::move(entry)); }
  json& config() { return config_; }

  void finish() {
    json manifest{{"tool", "cadtool"},
                  {"version", kToolVersion},
                  {"bundle_format_version", kBundleFormatVersion},
                  {"command", command_},
                  {"args", args_},
                  {"seed", opts_.seed},
                  {"config", config_},
                  {"inputs", inputs_},
                  {"outputs", outputs_}};
    write_text_file(path("manifest.json"), manifest.dump(2) + "\n");
  }

private:
  std::string command_;
  Options opts_;
  std::vector<std::string> args_;
  json config_ = json::object();
  json inputs_ = json::array();
  std::vector<std::string> outputs_;
};

Pipeline pipeline_for(const Options& o, ModelKind kind) {
  const auto mode = pipeline_mode_from_string(o.mode);
  for (auto p : standard_pipelines(mode, o.seed, o.tune, o.select_k)) {
    if (p.model.kind() != kind) continue;
    p.smote = !o.no_smote;
    p.smote_config.k_neighbors = o.smote_k;
    p.selection_bins = o.bins;
    return p;
  }
  throw ConfigError("no pipeline for model '" + std::string(to_string(kind)) + "'");
}

json pipeline_config(const Options& o, const Pipeline& p) {
  return {{"mode", std::string(to_string(p.mode))},
          {"k_folds", o.k},
          {"selection_k", p.selection_k},
          {"selection_bins", p.selection_bins},
          {"smote", p.smote},
          {"smote_k", p.smote_config.k_neighbors},
          {"tuned", o.tune},
          {"model", to_json(p.model)}};
}

void cmd_stats(const Options& o, Run& run) {
  auto in = load_input(o);
  run.add_input(in.manifest_entry);
  run.write("summary.csv", summary_csv(summarize(in.data)));
  run.write("correlation.csv", correlation_csv(correlation_matrix(in.data)));
}

void cmd_outliers(const Options& o, Run& run, std::ostream& out) {
  auto in = load_input(o);
  run.add_input(in.manifest_entry);
  run.config() = {{"outlier_factor", o.outlier_factor}, {"extreme_factor", o.extreme_factor}};
  const auto report = iqr_flag(in.data, o.outlier_factor, o.extreme_factor);
  run.write("outliers.csv", outliers_csv(report));
  for (const auto& f : report.features)
    if (f.outlier_count + f.extreme_count > 0)
      out << f.name << ": " << f.outlier_count << " outliers, " << f.extreme_count << " extremes\n";
}

void cmd_smote(const Options& o, Run& run, std::ostream& out) {
  auto in = load_input(o);
  run.add_input(in.manifest_entry);
  SmoteConfig cfg;
  cfg.k_neighbors = o.smote_k;
  cfg.seed = o.seed;
  run.config() = {{"smote_k", o.smote_k}, {"target", "balance"}};
  const auto before = in.data.class_counts();
  const auto balanced = smote(in.data, cfg);
  const auto after = balanced.class_counts();
  std::ostringstream csv;
  write_csv(balanced, csv);
  run.write("balanced.csv", csv.str());
  std::ostringstream log;
  log << "label,meaning,before,after\n"
      << "0," << in.data.schema.negative_label_meaning << ',' << before[0] << ',' << after[0] << '\n'
      << "1," << in.data.schema.positive_label_meaning << ',' << before[1] << ',' << after[1] << '\n';
  run.write("class_counts.csv", log.str());
  out << log.str();
}

void cmd_select(const Options& o, Run& run, std::ostream& out) {
  auto in = load_input(o);
  run.add_input(in.manifest_entry);
  run.config() = {{"selection_k", o.select_k}, {"bins", o.bins}};
  const auto ranking = rank_and_select(in.data, std::min(o.select_k, in.data.schema.size()), o.bins);
  run.write("ranking.csv", ranking_csv(ranking));
  std::string selected;
  for (const auto& f : ranking.selected.features) selected += f.name + "\n";
  run.write("selected.txt", selected);
  out << selected;
}

void cmd_train(const Options& o, Run& run, std::ostream& out) {
  auto in = load_input(o);
  run.add_input(in.manifest_entry);
  const auto pipeline = pipeline_for(o, model_kind_from_string(o.model));
  run.config() = pipeline_config(o, pipeline);
  ModelBundle bundle{fit_pipeline(in.data, pipeline, o.seed), json::object(), json::object(), std::nullopt};
  if (!o.no_cv) {
    const auto cv = evaluate_pipeline(in.data, pipeline, o.k, o.seed);
    bundle.metrics = to_json(cv.metrics);
    bundle.metrics.erase("roc_points");
    bundle.metrics["validation"] = std::to_string(o.k) + "-fold stratified CV, mode " + o.mode;
  }
  const auto& model = bundle.model;
  PatientRecord canary = in.data.project(model.schema.names()).records.front();
  canary.label.reset();
  canary.origin.reset();
  canary.out_of_range = false;
  try {
    validate_record(model.schema, canary);
  } catch (const DataError&) {
    canary.out_of_range = true;
  }
  bundle.canary = Canary{canary, predict(model, canary)};
  bundle.run = {{"seed", o.seed},
                {"pipeline", pipeline.id},
                {"config", run.config()},
                {"dataset", in.data.provenance},
                {"input", in.manifest_entry},
                {"features", model.schema.names()},
                {"tool_version", kToolVersion}};
  save_bundle(bundle, run.path("model.cadm"));
  // same document GET /model/info serves
  const auto info = service::Service::from_file(run.path("model.cadm")).model_info();
  run.write("model_info.json", info.body.dump(2) + "\n");
  out << "wrote " << run.path("model.cadm") << " (" << to_string(model.kind()) << ", "
      << model.schema.size() << " features)\n";
  if (bundle.metrics.contains("accuracy") && !bundle.metrics["accuracy"].is_null())
    out << "cv accuracy " << format_fixed(bundle.metrics["accuracy"].get<double>() * 100.0, 2) << "%\n";
}

void write_roc_files(Run& run, const std::vector<BenchmarkRow>& rows) {
  for (const auto& row : rows)
    if (row.result) run.write("roc_" + row.id + ".csv", roc_csv(row.result->metrics.roc_points));
  run.write("roc.svg", roc_svg(rows));
}

void cmd_evaluate(const Options& o, Run& run, std::ostream& out) {
  auto in = load_input(o);
  run.add_input(in.manifest_entry);
  const auto pipeline = pipeline_for(o, model_kind_from_string(o.model));
  run.config() = pipeline_config(o, pipeline);
  const auto cv = evaluate_pipeline(in.data, pipeline, o.k, o.seed);
  std::vector<BenchmarkRow> rows{{pipeline.name, pipeline.id, cv, {}}};
  json detail = to_json(cv.metrics);
  json specs = json::array();
  for (const auto& s : cv.fold_specs) specs.push_back(to_json(s));
  detail["fold_specs"] = specs;
  detail["fold_features"] = cv.fold_features;
  run.write("metrics.json", detail.dump(2) + "\n");
  run.write("report.csv", report_csv(rows));
  run.write("predictions.csv", predictions_csv(cv));
  write_roc_files(run, rows);
  out << report_csv(rows);
}

void cmd_benchmark(const Options& o, Run& run, std::ostream& out) {
  auto in = load_input(o);
  run.add_input(in.manifest_entry);
  const auto mode = pipeline_mode_from_string(o.mode);
  // Fixed order clean -> balance -> select -> train -> validate; SMOTE is not optional here.
  auto pipelines = standard_pipelines(mode, o.seed, o.tune, o.select_k);
  for (auto& p : pipelines) {
    p.smote_config.k_neighbors = o.smote_k;
    p.selection_bins = o.bins;
  }
  run.config() = {{"mode", o.mode},         {"k_folds", o.k},          {"selection_k", o.select_k},
                  {"selection_bins", o.bins}, {"smote_k", o.smote_k}, {"tuned", o.tune}};
  const auto rows = benchmark_report(in.data, pipelines, o.k, o.seed);
  run.write("report.csv", report_csv(rows));
  write_roc_files(run, rows);
  json detail = json::array();
  for (const auto& row : rows) {
    json r{{"model", row.name}, {"id", row.id}};
    if (row.result) {
      r["metrics"] = to_json(row.result->metrics);
      r["metrics"].erase("roc_points");
      json specs = json::array();
      for (const auto& s : row.result->fold_specs) specs.push_back(to_json(s));
      r["fold_specs"] = specs;
    } else {
      r["error"] = row.error;
    }
    detail.push_back(r);
  }
  run.write("benchmark.json", detail.dump(2) + "\n");
  out << report_csv(rows);
  for (const auto& row : rows)
    if (!row.result) out << "error in " << row.name << ": " << row.error << '\n';
}

void cmd_predict(const Options& o, Run& run, std::ostream& out) {
  const auto service = service::Service::from_file(o.bundle);
  const auto text = read_file(o.input);
  run.add_input({{"source", o.bundle}, {"version", service.version_id()}});
  run.add_input({{"source", o.input}, {"crc32", hex8(crc32_of(text))}});
  json body;
  try {
    body = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError("'" + o.input + "' is not valid JSON: " + e.what());
  }
  if (o.allow_out_of_range && body.is_object()) body["allow_out_of_range"] = true;
  const auto r = service.predict(body);
  if (r.status != 200) throw DataError(r.body["error"].get<std::string>());
  run.write("prediction.json", r.body.dump(2) + "\n");
  out << r.body.dump(2) << '\n';
}

int cmd_serve(const Options& o, Run& run, std::ostream& out) {
  service::ServiceConfig cfg;
  cfg.bind = o.bind;
  cfg.cors_origin = o.cors_origin;
  run.config() = {{"bind", o.bind.empty() ? "(CAD_BIND or default)" : o.bind}, {"cors_origin", o.cors_origin}};
  run.add_input({{"source", o.bundle.empty() ? "(CAD_BUNDLE)" : o.bundle}});
  run.finish();
  return service::serve(o.bundle, cfg, out);
}

void add_data_options(CLI::App* sub, Options& o) {
  sub->add_option("--data", o.data, "Input CSV");
  sub->add_flag("--fixture", o.fixture, "Use the built-in synthetic cohort instead of --data");
  sub->add_option("--fixture-seed", o.fixture_seed, "Seed of the synthetic cohort");
  sub->add_option("--fixture-records", o.fixture_records, "Size of the synthetic cohort");
  sub->add_option("--fixture-noise", o.fixture_noise, "Extra uninformative columns in the synthetic cohort");
  sub->add_option("--schema", o.schema_file, "Schema file (default: built-in CAD schema)");
  sub->add_flag("--impute", o.impute, "Median-impute missing numeric cells");
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--seed", o.seed, "Random seed");
}

void add_pipeline_options(CLI::App* sub, Options& o, bool with_model) {
  sub->add_option("--mode", o.mode, "default (per-fold preprocessing) or paper (global)")
      ->check(CLI::IsMember({"default", "paper"}));
  sub->add_option("--k", o.k, "Cross-validation folds");
  sub->add_option("--select-k", o.select_k, "Features kept by gain-ratio selection (0 = all)");
  sub->add_option("--bins", o.bins, "Equal-frequency bins for numeric features");
  sub->add_option("--smote-k", o.smote_k, "SMOTE neighbours");
  sub->add_flag("--tune", o.tune, "Grid-search hyperparameters on training data");
  if (with_model) {
    sub->add_option("--model", o.model, "tree|j48, forest|rf, adaboost, mlp, naive_bayes|nb, knn, voting");
    sub->add_flag("--no-smote", o.no_smote, "Skip SMOTE balancing");
  }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Coronary artery disease classification toolkit", "cadtool"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  auto* stats = app.add_subcommand("stats", "Summary statistics and correlation matrix");
  add_data_options(stats, o);
  auto* outliers = app.add_subcommand("outliers", "IQR outlier and extreme report");
  add_data_options(outliers, o);
  outliers->add_option("--factor", o.outlier_factor, "Outlier IQR factor");
  outliers->add_option("--extreme", o.extreme_factor, "Extreme IQR factor");
  auto* smote_cmd = app.add_subcommand("smote", "Balance classes with SMOTE");
  add_data_options(smote_cmd, o);
  smote_cmd->add_option("--smote-k", o.smote_k, "SMOTE neighbours");
  auto* select = app.add_subcommand("select", "Rank features by gain ratio");
  add_data_options(select, o);
  select->add_flag("--raw", o.raw, "Load every CSV column instead of the schema features");
  select->add_option("--select-k", o.select_k, "Features to keep");
  select->add_option("--bins", o.bins, "Equal-frequency bins for numeric features");
  auto* train = app.add_subcommand("train", "Train a model and write a bundle");
  add_data_options(train, o);
  add_pipeline_options(train, o, true);
  train->add_flag("--no-cv", o.no_cv, "Skip the cross-validated metrics stored in the bundle");
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validate one pipeline");
  add_data_options(evaluate, o);
  add_pipeline_options(evaluate, o, true);
  auto* benchmark = app.add_subcommand("benchmark", "Cross-validate every standard pipeline");
  add_data_options(benchmark, o);
  add_pipeline_options(benchmark, o, false);
  auto* predict_cmd = app.add_subcommand("predict", "Predict one record from a JSON file");
  predict_cmd->add_option("--bundle", o.bundle, "Model bundle")->required();
  predict_cmd->add_option("--input", o.input, "JSON object of feature values")->required();
  predict_cmd->add_flag("--allow-out-of-range", o.allow_out_of_range, "Accept values outside the schema range");
  predict_cmd->add_option("--out", o.out, "Output directory");
  auto* serve_cmd = app.add_subcommand("serve", "Serve a bundle over HTTP");
  serve_cmd->add_option("--bundle", o.bundle, "Model bundle (default: $CAD_BUNDLE)");
  serve_cmd->add_option("--bind", o.bind, "host:port (default: $CAD_BIND or 127.0.0.1:8080)");
  serve_cmd->add_option("--cors-origin", o.cors_origin, "Allowed browser origin (empty disables CORS)");
  serve_cmd->add_option("--out", o.out, "Directory for the run manifest");

  std::vector<std::string> argv_store{"cadtool"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  auto* sub = app.get_subcommands().front();
  try {
    Run run(sub->get_name(), o, args);
    const auto& name = sub->get_name();
    if (name == "serve") return cmd_serve(o, run, err);
    if (name == "stats") cmd_stats(o, run);
    else if (name == "outliers") cmd_outliers(o, run, out);
    else if (name == "smote") cmd_smote(o, run, out);
    else if (name == "select") cmd_select(o, run, out);
    else if (name == "train") cmd_train(o, run, out);
    else if (name == "evaluate") cmd_evaluate(o, run, out);
    else if (name == "benchmark") cmd_benchmark(o, run, out);
    else if (name == "predict") cmd_predict(o, run, out);
    run.finish();
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  } catch (const BundleError& e) {
    err << "bundle error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 3;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

} // namespace cad::cli
