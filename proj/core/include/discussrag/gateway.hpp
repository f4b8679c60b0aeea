#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "discussrag/errors.hpp"

namespace discussrag {

enum class Role { system, user, assistant };

std::string_view role_name(Role role);
Role role_from_name(std::string_view name);

struct ChatMessage {
  Role role = Role::user;
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;  // determinism-first default
  int max_tokens = 1024;
  std::string model_id;

  // Throws InvalidRequest when the message list is empty, does not start
  // with a system message, or temperature is not finite and >= 0.
  void validate() const;
};

enum class FinishReason { stop, length, error };

std::string_view finish_reason_name(FinishReason reason);
FinishReason finish_reason_from_name(std::string_view name);

struct TokenUsage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct ChatCompletion {
  std::string content;
  FinishReason finish_reason = FinishReason::stop;
  TokenUsage usage;
};

struct EmbeddingVector {
  std::vector<float> values;

  size_t dim() const { return values.size(); }
};

// Stable identity of a chat request: FNV-1a over the ordered roles and the
// whitespace-normalized message contents. Fixtures match on this, so any
// prompt drift shows up as a FixtureExhausted in tests.
std::string request_fingerprint(const ChatRequest& request);

// Uniform access to chat completion and text embedding. Implementations:
// HttpGateway (live, OpenAI-compatible) and ScriptedGateway (deterministic
// fixture replay for tests).
class LlmGateway {
 public:
  virtual ~LlmGateway() = default;

  virtual ChatCompletion complete(const ChatRequest& request) = 0;

  // One vector per input text, all with the same dimension. Inputs must be
  // non-empty after whitespace trimming.
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;

  virtual std::string backend_id() const = 0;
  virtual std::string embedder_id() const = 0;

  // Embedding dimension when known up front (scripted backend). Live
  // backends learn it from the first response.
  virtual std::optional<uint32_t> embedding_dim() const { return std::nullopt; }

  // True when replaying fixtures: repeated runs are bitwise identical and
  // wall-clock timings are suppressed in traces.
  virtual bool deterministic() const { return false; }
};

// Checks the shared embed() preconditions. Called by every backend.
void validate_embed_inputs(const std::vector<std::string>& texts);

}  // namespace discussrag
