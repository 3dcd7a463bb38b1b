#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "cad/model.hpp"

namespace cad {

/// Container format version written in the header line.
inline constexpr int kBundleFormatVersion = 1;
/// Version of the JSON body layout (model payloads, schema block).
inline constexpr int kBundleSchemaVersion = 1;

struct Canary {
  PatientRecord record;
  Prediction expected;
};

struct ModelBundle {
  TrainedModel model;
  /// Free-form metrics of the training run (MetricsReport JSON), shown by /model/info.
  nlohmann::json metrics = nlohmann::json::object();
  /// Run metadata (seed, dataset checksum, mode, ...).
  nlohmann::json run = nlohmann::json::object();
  std::optional<Canary> canary;
};

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

/// Serialized bytes: header line + JSON body.
std::string encode_bundle(const ModelBundle& bundle);
/// Throws BundleError on bad magic, version mismatch, length or checksum failure.
ModelBundle decode_bundle(const std::string& bytes);

void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

/// Convenience wrappers for a bare model (no metrics, no canary).
void save_bundle(const TrainedModel& model, const std::string& path);

/// "cadm1-<crc32 hex>" of the encoded body.
std::string bundle_version_id(const std::string& bytes);

/// Recomputes the canary prediction and compares it bit-for-bit.
/// Returns an error message, or nullopt when the check passes or no canary exists.
std::optional<std::string> check_canary(const ModelBundle& bundle);

std::uint32_t crc32_of(std::string_view data);

} // namespace cad
