#include "cad/service.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <pthread.h>
#include <signal.h>
#include <unistd.h>

#include <httplib.h>

#include "cad/ensemble.hpp"
#include "cad/errors.hpp"

namespace cad::service {

using nlohmann::json;

Response error_response(int status, std::string message, std::vector<std::string> fields) {
  return {status, json{{"error", std::move(message)}, {"fields", std::move(fields)}}};
}

namespace {

constexpr const char* kOverrideField = "allow_out_of_range";

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string label_text(const FeatureSchema& schema, int label) {
  return label == 1 ? schema.positive_label_meaning : schema.negative_label_meaning;
}

struct ParsedRequest {
  PatientRecord record;
  std::vector<std::string> warnings;
};

/// Either a record ready for prediction or the error response to send.
std::variant<ParsedRequest, Response> parse_request(const FeatureSchema& schema, const json& body) {
  if (!body.is_object()) return error_response(400, "request body must be a JSON object");
  bool allow = false;
  if (body.contains(kOverrideField)) {
    if (!body[kOverrideField].is_boolean())
      return error_response(422, "allow_out_of_range must be a boolean", {kOverrideField});
    allow = body[kOverrideField].get<bool>();
  }
  std::vector<std::string> extra, missing, non_numeric, out_of_range;
  for (const auto& [key, value] : body.items())
    if (key != kOverrideField && !schema.index_of(key)) extra.push_back(key);
  for (const auto& f : schema.features)
    if (!body.contains(f.name)) missing.push_back(f.name);
  if (!missing.empty() || !extra.empty()) {
    std::string msg;
    if (!missing.empty()) msg = "missing field(s): " + join(missing);
    if (!extra.empty()) msg += (msg.empty() ? "" : "; ") + std::string("unknown field(s): ") + join(extra);
    auto fields = missing;
    fields.insert(fields.end(), extra.begin(), extra.end());
    return error_response(400, msg, fields);
  }
  ParsedRequest out;
  std::vector<std::string> range_msgs;
  for (const auto& f : schema.features) {
    const auto& v = body[f.name];
    if (!v.is_number()) {
      non_numeric.push_back(f.name);
      continue;
    }
    const double x = v.get<double>();
    out.record.values.push_back(x);
    if (!f.contains(x)) {
      out_of_range.push_back(f.name);
      range_msgs.push_back(f.name + "=" + format_double(x) + " outside valid range " + f.range_text());
    }
  }
  if (!non_numeric.empty()) return error_response(422, "non-numeric value for: " + join(non_numeric), non_numeric);
  if (!out_of_range.empty()) {
    if (!allow) return error_response(400, "value out of range: " + join(range_msgs), out_of_range);
    out.record.out_of_range = true;
    out.warnings = range_msgs;
  }
  return out;
}

json predict_body(const Service& s, const ParsedRequest& req) {
  const auto& model = s.bundle().model;
  const auto& schema = model.schema;
  json votes = json::array();
  int label = 0;
  double p = 0.5;
  bool tie = false;
  if (const auto* voting = std::get_if<VotingModel>(&model.payload)) {
    const auto result = vote(model, req.record);
    label = result.label;
    p = result.p_positive;
    tie = result.tie;
    for (std::size_t i = 0; i < result.members.size(); ++i)
      votes.push_back({{"member", std::string(to_string(voting->members[i].kind()))},
                       {"label", label_text(schema, result.members[i].label)},
                       {"p_positive", result.members[i].p_positive}});
  } else {
    const auto pred = predict(model, req.record);
    label = pred.label;
    p = pred.p_positive;
    votes.push_back({{"member", std::string(to_string(model.kind()))},
                     {"label", label_text(schema, pred.label)},
                     {"p_positive", pred.p_positive}});
  }
  return json{{"label", label_text(schema, label)}, {"p_positive", p},        {"votes", votes},
              {"tie", tie},                        {"model_version", s.version_id()}, {"warnings", req.warnings}};
}

Response parse_json(const std::string& body, json& out) {
  try {
    out = json::parse(body);
  } catch (const json::parse_error& e) {
    return error_response(400, std::string("invalid JSON: ") + e.what());
  }
  return {200, {}};
}

} // namespace

Service::Service(ModelBundle bundle, ServiceConfig config, std::optional<std::string> version_id)
    : bundle_(std::move(bundle)), config_(std::move(config)) {
  if (auto problem = check_canary(bundle_)) throw BundleError("bundle self-check failed: " + *problem);
  version_id_ = version_id ? *version_id : bundle_version_id(encode_bundle(bundle_));
}

Service Service::from_file(const std::string& path, ServiceConfig config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BundleError("cannot open bundle '" + path + "'");
  std::ostringstream bytes;
  bytes << in.rdbuf();
  auto bundle = decode_bundle(bytes.str());
  return Service(std::move(bundle), std::move(config), bundle_version_id(bytes.str()));
}

Response Service::health() const { return {200, json{{"status", "ok"}}}; }

Response Service::model_info() const {
  const auto& model = bundle_.model;
  json members = json::array();
  if (const auto* voting = std::get_if<VotingModel>(&model.payload))
    for (const auto& m : voting->members) members.push_back(std::string(to_string(m.kind())));
  json features = json::array();
  for (const auto& f : model.schema.features) {
    json lo = std::isfinite(f.lo) ? json(f.lo) : json(nullptr);
    json hi = std::isfinite(f.hi) ? json(f.hi) : json(nullptr);
    features.push_back({{"name", f.name},
                        {"kind", std::string(to_string(f.kind))},
                        {"unit", f.unit},
                        {"min", lo},
                        {"max", hi},
                        {"categories", f.categories},
                        {"range", f.range_text()}});
  }
  return {200, json{{"model_version", version_id_},
                    {"model_kind", std::string(to_string(model.kind()))},
                    {"members", members},
                    {"features", features},
                    {"schema", to_json(model.schema)},
                    {"labels", {{"positive", model.schema.positive_label_meaning},
                                {"negative", model.schema.negative_label_meaning}}},
                    {"metrics", bundle_.metrics},
                    {"run", bundle_.run},
                    {"bundle_format_version", kBundleFormatVersion}}};
}

Response Service::predict(const std::string& body) const {
  json j;
  if (auto r = parse_json(body, j); r.status != 200) return r;
  return predict(j);
}

Response Service::predict(const json& body) const {
  auto parsed = parse_request(bundle_.model.schema, body);
  if (auto* err = std::get_if<Response>(&parsed)) return *err;
  try {
    return {200, predict_body(*this, std::get<ParsedRequest>(parsed))};
  } catch (const DataError& e) {
    return error_response(400, e.what());
  }
}

Response Service::whatif(const std::string& body) const {
  json j;
  if (auto r = parse_json(body, j); r.status != 200) return r;
  return whatif(j);
}

Response Service::whatif(const json& body) const {
  if (!body.is_object() || !body.contains("base") || !body.contains("sweep"))
    return error_response(400, "body must contain 'base' and 'sweep'", {"base", "sweep"});
  const auto& base = body["base"];
  const auto& sweep = body["sweep"];
  if (!base.is_object()) return error_response(400, "'base' must be an object", {"base"});
  if (!sweep.is_object() || !sweep.contains("feature") || !sweep["feature"].is_string() || !sweep.contains("values") ||
      !sweep["values"].is_array())
    return error_response(400, "'sweep' must be {\"feature\": name, \"values\": [...]}", {"sweep"});
  const auto feature = sweep["feature"].get<std::string>();
  if (!bundle_.model.schema.index_of(feature)) return error_response(400, "unknown sweep feature '" + feature + "'", {feature});
  const auto& values = sweep["values"];
  if (values.size() > config_.max_sweep)
    return error_response(400, "sweep too large: " + std::to_string(values.size()) + " points (limit " +
                                   std::to_string(config_.max_sweep) + ")", {"sweep"});
  json results = json::array();
  for (const auto& v : values) {
    json point = base;
    point[feature] = v;
    const auto r = predict(point);
    json entry{{"value", v}, {"status", r.status}};
    if (r.status == 200) entry["response"] = r.body;
    else {
      entry["error"] = r.body["error"];
      entry["fields"] = r.body["fields"];
    }
    results.push_back(std::move(entry));
  }
  return {200, json{{"feature", feature}, {"results", results}, {"model_version", version_id_}}};
}

std::pair<std::string, int> parse_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == bind.size())
    throw ConfigError("bind address must look like host:port (got '" + bind + "')");
  const auto port_text = bind.substr(colon + 1);
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(port_text, &used);
    if (used != port_text.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ConfigError("invalid port in bind address '" + bind + "'");
  }
  if (port < 0 || port > 65535) throw ConfigError("port out of range in bind address '" + bind + "'");
  return {bind.substr(0, colon), port};
}

struct HttpServer::Impl {
  const Service& service;
  std::ostream* log;
  std::mutex log_mutex;
  httplib::Server server;

  Impl(const Service& s, std::ostream* l) : service(s), log(l) {}
};

namespace {

void send(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

} // namespace

HttpServer::HttpServer(const Service& service, std::ostream* log) : impl_(std::make_unique<Impl>(service, log)) {
  auto& srv = impl_->server;
  const Service& s = impl_->service;
  srv.Get("/health", [&s](const httplib::Request&, httplib::Response& res) { send(res, s.health()); });
  srv.Get("/model/info", [&s](const httplib::Request&, httplib::Response& res) { send(res, s.model_info()); });
  srv.Post("/predict", [&s](const httplib::Request& req, httplib::Response& res) { send(res, s.predict(req.body)); });
  srv.Post("/whatif", [&s](const httplib::Request& req, httplib::Response& res) { send(res, s.whatif(req.body)); });
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, error_response(500, what));
  });
  const auto origin = s.config().cors_origin;
  srv.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    if (origin.empty()) return;
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  Impl* impl = impl_.get();
  srv.set_logger([impl](const httplib::Request& req, const httplib::Response& res) {
    if (!impl->log) return;
    json line{{"ts", utc_timestamp()},  {"method", req.method},       {"path", req.path},
              {"status", res.status},   {"remote", req.remote_addr}, {"bytes_in", req.body.size()},
              {"bytes_out", res.body.size()}};
    std::lock_guard lock(impl->log_mutex);
    *impl->log << line.dump() << '\n' << std::flush;
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  if (port == 0) {
    const int got = srv.bind_to_any_port(host);
    if (got < 0) throw ConfigError("cannot bind to " + host);
    return got;
  }
  if (!srv.bind_to_port(host, port)) throw ConfigError("cannot bind to " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }
void HttpServer::stop() { impl_->server.stop(); }
void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

int serve(std::string bundle_path, ServiceConfig config, std::ostream& log) {
  if (bundle_path.empty()) {
    const char* env = std::getenv("CAD_BUNDLE");
    if (!env || !*env) throw ConfigError("no bundle given (pass --bundle or set CAD_BUNDLE)");
    bundle_path = env;
  }
  if (config.bind.empty()) {
    const char* env = std::getenv("CAD_BIND");
    config.bind = env && *env ? env : "127.0.0.1:8080";
  }
  const auto [host, port] = parse_bind(config.bind);
  const auto service = Service::from_file(bundle_path, config);

  // Block the shutdown signals before any server thread starts so only the
  // waiter below receives them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  HttpServer server(service, &log);
  const int bound = server.bind(host, port);
  std::cerr << "serving " << service.version_id() << " on " << host << ":" << bound << "\n";

  std::atomic<bool> signalled{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    signalled = true;
    server.stop();
  });
  server.listen();
  // listen() also returns on its own failure; wake the waiter in that case.
  // The signals stay blocked so this self-sent one cannot terminate us.
  const bool clean = signalled.load();
  if (!clean) kill(getpid(), SIGTERM);
  waiter.join();
  std::cerr << "shutdown\n";
  return clean ? 0 : 3;
}

} // namespace cad::service
