#include "discussrag/manifest.hpp"

#include <ctime>
#include <fstream>

#include "discussrag/errors.hpp"

namespace discussrag {

std::string utc_timestamp_now() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buffer;
}

nlohmann::json manifest_to_json(const RunManifest& manifest) {
  return {
      {"config", manifest.config},
      {"corpus_fingerprint", manifest.corpus_fingerprint},
      {"template_fingerprint", manifest.template_fingerprint},
      {"backend_id", manifest.backend_id},
      {"embedder_id", manifest.embedder_id},
      {"timestamp", manifest.timestamp},
  };
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write manifest: " + path.string());
  out << manifest_to_json(manifest).dump(2) << '\n';
}

}  // namespace discussrag
