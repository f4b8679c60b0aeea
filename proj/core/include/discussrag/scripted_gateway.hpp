#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "discussrag/gateway.hpp"

namespace discussrag {

// Deterministic embedding without a model: each lowercased alphanumeric
// token maps to a pseudo-random vector seeded from its hash, the text vector
// is the normalized sum. Texts that share tokens get correlated vectors, so
// lexical overlap shows up as cosine similarity. Bitwise reproducible.
class HashingEmbedder {
 public:
  explicit HashingEmbedder(uint32_t dim = 64, uint64_t seed = 0);

  EmbeddingVector embed_one(std::string_view text) const;

  uint32_t dim() const { return dim_; }
  uint64_t seed() const { return seed_; }
  std::string id() const;

 private:
  uint32_t dim_;
  uint64_t seed_;
};

// One scripted completion. An entry with fingerprint "*" matches any request
// and is consumed in file order; an exact fingerprint only matches requests
// that hash to it. finish_reason "error" makes the backend throw
// TransportError(content) instead of returning, for fault injection.
struct FixtureEntry {
  std::string fingerprint = "*";
  std::string content;
  FinishReason finish_reason = FinishReason::stop;
};

std::vector<FixtureEntry> load_fixture_file(const std::filesystem::path& path);
void save_fixture_file(const std::filesystem::path& path, const std::vector<FixtureEntry>& entries);

// Replays fixture completions and produces hash-based embeddings. A pure
// function of (fixture, request sequence): repeating a run yields bitwise
// identical completions and embeddings. Fixture consumption is serialized
// internally, but scripted runs must still be single-threaded — concurrent
// callers would race for entries and break replay determinism.
class ScriptedGateway : public LlmGateway {
 public:
  explicit ScriptedGateway(std::vector<FixtureEntry> entries, uint32_t embed_dim = 64,
                           uint64_t embed_seed = 0);

  static ScriptedGateway from_file(const std::filesystem::path& path, uint32_t embed_dim = 64,
                                   uint64_t embed_seed = 0);

  ChatCompletion complete(const ChatRequest& request) override;
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

  std::string backend_id() const override { return "scripted"; }
  std::string embedder_id() const override { return embedder_.id(); }
  std::optional<uint32_t> embedding_dim() const override { return embedder_.dim(); }
  bool deterministic() const override { return true; }

  // Every chat request seen, in call order. Tests assert on prompt content
  // through this.
  const std::vector<ChatRequest>& request_log() const { return request_log_; }
  size_t entries_consumed() const;
  size_t entries_remaining() const;

 private:
  HashingEmbedder embedder_;
  std::vector<FixtureEntry> entries_;
  std::vector<bool> consumed_;
  std::vector<ChatRequest> request_log_;
  mutable std::mutex mutex_;
};

}  // namespace discussrag
