#include "discussrag/gateway.hpp"

#include <cmath>

#include "discussrag/hashing.hpp"

namespace discussrag {

std::string_view role_name(Role role) {
  switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

Role role_from_name(std::string_view name) {
  if (name == "system") return Role::system;
  if (name == "assistant") return Role::assistant;
  if (name == "user") return Role::user;
  throw InvalidRequest("unknown chat role: " + std::string(name));
}

std::string_view finish_reason_name(FinishReason reason) {
  switch (reason) {
    case FinishReason::stop: return "stop";
    case FinishReason::length: return "length";
    case FinishReason::error: return "error";
  }
  return "error";
}

FinishReason finish_reason_from_name(std::string_view name) {
  if (name == "stop") return FinishReason::stop;
  if (name == "length") return FinishReason::length;
  if (name == "error") return FinishReason::error;
  throw InvalidRequest("unknown finish reason: " + std::string(name));
}

void ChatRequest::validate() const {
  if (messages.empty()) throw InvalidRequest("chat request has no messages");
  if (messages.front().role != Role::system)
    throw InvalidRequest("chat request must start with a system message");
  if (!std::isfinite(temperature) || temperature < 0.0)
    throw InvalidRequest("chat request temperature must be finite and >= 0");
  if (max_tokens <= 0) throw InvalidRequest("chat request max_tokens must be positive");
}

std::string request_fingerprint(const ChatRequest& request) {
  uint64_t state = kFnvOffset;
  for (const ChatMessage& message : request.messages) {
    state = fnv1a64(role_name(message.role), state);
    state = fnv1a64_byte(0x1f, state);
    state = fnv1a64(normalize_whitespace(message.content), state);
    state = fnv1a64_byte(0x1e, state);
  }
  return to_hex16(state);
}

void validate_embed_inputs(const std::vector<std::string>& texts) {
  if (texts.empty()) throw InvalidRequest("embed called with no texts");
  for (const std::string& text : texts) {
    if (trim(text).empty())
      throw InvalidRequest("embed input is empty after whitespace trimming");
  }
}

}  // namespace discussrag
