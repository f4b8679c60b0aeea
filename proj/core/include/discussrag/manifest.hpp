#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace discussrag {

// Written once per run next to the outputs: enough to re-execute the run
// bit-identically under the scripted backend.
struct RunManifest {
  nlohmann::json config;  // resolved settings snapshot
  std::string corpus_fingerprint;
  std::string template_fingerprint;
  std::string backend_id;
  std::string embedder_id;
  std::string timestamp;  // UTC, ISO 8601
};

std::string utc_timestamp_now();

nlohmann::json manifest_to_json(const RunManifest& manifest);

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace discussrag
