#pragma once

#include <string>
#include <vector>

#include "discussrag/gateway.hpp"

namespace discussrag {

struct HttpGatewayOptions {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string api_key;
  std::string embed_model = "text-embedding-3-small";
  int max_attempts = 3;
  int initial_backoff_ms = 250;  // doubles after each failed attempt
  int connect_timeout_s = 10;
  int read_timeout_s = 120;
};

// OpenAI-compatible backend: POST {base_url}/chat/completions and
// POST {base_url}/embeddings with bearer-token auth. Transient failures
// (connection errors, 408, 429, 5xx) are retried with doubling backoff up
// to max_attempts, then surface as TransportError; other non-2xx statuses
// are BackendRefusal. A fresh connection per call keeps the gateway safe
// to share across threads.
class HttpGateway : public LlmGateway {
 public:
  explicit HttpGateway(HttpGatewayOptions options);

  // Reads the token from DISCUSS_RAG_API_KEY when options.api_key is empty.
  static HttpGateway from_env(HttpGatewayOptions options);

  ChatCompletion complete(const ChatRequest& request) override;
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

  std::string backend_id() const override;
  std::string embedder_id() const override { return options_.embed_model; }

 private:
  std::string post_json(const std::string& path, const std::string& body);

  HttpGatewayOptions options_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

}  // namespace discussrag
