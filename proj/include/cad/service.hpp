#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cad/bundle.hpp"

namespace cad::service {

struct ServiceConfig {
  /// host:port
  std::string bind = "127.0.0.1:8080";
  /// Value of Access-Control-Allow-Origin; empty disables CORS headers.
  std::string cors_origin = "http://localhost:5173";
  std::size_t max_sweep = 200;
};

struct Response {
  int status = 200;
  nlohmann::json body;
};

/// Request handling over an immutable bundle. All handlers are const and
/// safe to call concurrently.
class Service {
public:
  /// Runs the canary self-check; throws BundleError when it fails.
  explicit Service(ModelBundle bundle, ServiceConfig config = {}, std::optional<std::string> version_id = std::nullopt);
  /// Loads and self-checks a bundle file.
  static Service from_file(const std::string& path, ServiceConfig config = {});

  Response health() const;
  Response model_info() const;
  Response predict(const std::string& body) const;
  Response predict(const nlohmann::json& body) const;
  Response whatif(const std::string& body) const;
  Response whatif(const nlohmann::json& body) const;

  const ModelBundle& bundle() const { return bundle_; }
  const ServiceConfig& config() const { return config_; }
  const std::string& version_id() const { return version_id_; }

private:
  ModelBundle bundle_;
  ServiceConfig config_;
  std::string version_id_;
};

Response error_response(int status, std::string message, std::vector<std::string> fields = {});

/// Splits "host:port"; throws ConfigError when malformed.
std::pair<std::string, int> parse_bind(const std::string& bind);

/// HTTP front end. Logs one JSON line per request to `log` when non-null.
class HttpServer {
public:
  HttpServer(const Service& service, std::ostream* log = nullptr);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the listening socket. Port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called.
  void listen();
  void stop();
  void wait_until_ready() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Loads the bundle (CAD_BUNDLE when path is empty), binds (CAD_BIND when
/// config.bind is empty) and serves until SIGINT/SIGTERM.
int serve(std::string bundle_path, ServiceConfig config, std::ostream& log);

} // namespace cad::service
