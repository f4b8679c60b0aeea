#include <httplib.h>

#include "discussrag/http_gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <nlohmann/json.hpp>

namespace discussrag {

namespace {

bool retryable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

std::string status_detail(int status, const std::string& body) {
  std::string detail = "HTTP " + std::to_string(status);
  // Error bodies are {"error": {"message": ...}} on OpenAI-style APIs.
  try {
    auto parsed = nlohmann::json::parse(body);
    if (parsed.contains("error") && parsed["error"].contains("message"))
      return detail + ": " + parsed["error"]["message"].get<std::string>();
  } catch (const nlohmann::json::exception&) {
  }
  if (!body.empty()) detail += ": " + body.substr(0, 200);
  return detail;
}

}  // namespace

HttpGateway::HttpGateway(HttpGatewayOptions options) : options_(std::move(options)) {
  if (options_.base_url.empty()) throw ConfigError("gateway base URL is empty");
  if (options_.max_attempts < 1) throw ConfigError("max_attempts must be at least 1");

  // Split "scheme://host:port/prefix" so the prefix can be prepended to
  // request paths; httplib clients take only scheme://host:port.
  std::string url = options_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  size_t scheme_end = url.find("://");
  size_t path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = url;
  } else {
    scheme_host_port_ = url.substr(0, path_start);
    path_prefix_ = url.substr(path_start);
  }
}

HttpGateway HttpGateway::from_env(HttpGatewayOptions options) {
  if (options.api_key.empty()) {
    const char* key = std::getenv("DISCUSS_RAG_API_KEY");
    if (key != nullptr) options.api_key = key;
  }
  return HttpGateway(std::move(options));
}

std::string HttpGateway::backend_id() const {
  return "openai-compat " + options_.base_url;
}

std::string HttpGateway::post_json(const std::string& path, const std::string& body) {
  httplib::Headers headers;
  if (!options_.api_key.empty())
    headers.emplace("Authorization", "Bearer " + options_.api_key);

  std::string last_error;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    if (attempt > 1) {
      int delay = options_.initial_backoff_ms << (attempt - 2);
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }

    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(options_.connect_timeout_s, 0);
    client.set_read_timeout(options_.read_timeout_s, 0);

    auto res = client.Post(path_prefix_ + path, headers, body, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    if (retryable_status(res->status)) {
      last_error = status_detail(res->status, res->body);
      continue;
    }
    throw BackendRefusal(status_detail(res->status, res->body));
  }
  throw TransportError("request to " + path + " failed after " +
                       std::to_string(options_.max_attempts) + " attempts: " + last_error);
}

ChatCompletion HttpGateway::complete(const ChatRequest& request) {
  request.validate();

  nlohmann::json messages = nlohmann::json::array();
  for (const ChatMessage& message : request.messages)
    messages.push_back({{"role", std::string(role_name(message.role))},
                        {"content", message.content}});
  nlohmann::json payload = {
      {"model", request.model_id},
      {"messages", std::move(messages)},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };

  const std::string body = post_json("/chat/completions", payload.dump());
  try {
    auto parsed = nlohmann::json::parse(body);
    const auto& choice = parsed.at("choices").at(0);

    ChatCompletion completion;
    completion.content = choice.at("message").value("content", "");
    const std::string finish = choice.value("finish_reason", "stop");
    if (finish == "stop")
      completion.finish_reason = FinishReason::stop;
    else if (finish == "length")
      completion.finish_reason = FinishReason::length;
    else
      completion.finish_reason = FinishReason::error;
    if (completion.finish_reason == FinishReason::stop && completion.content.empty())
      completion.finish_reason = FinishReason::error;

    if (parsed.contains("usage")) {
      completion.usage.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
      completion.usage.completion_tokens = parsed["usage"].value("completion_tokens", 0);
    }
    return completion;
  } catch (const nlohmann::json::exception& ex) {
    throw TransportError(std::string("malformed completion response: ") + ex.what());
  }
}

std::vector<EmbeddingVector> HttpGateway::embed(const std::vector<std::string>& texts) {
  validate_embed_inputs(texts);

  nlohmann::json payload = {
      {"model", options_.embed_model},
      {"input", texts},
  };

  const std::string body = post_json("/embeddings", payload.dump());
  std::vector<EmbeddingVector> out(texts.size());
  try {
    auto parsed = nlohmann::json::parse(body);
    const auto& data = parsed.at("data");
    if (data.size() != texts.size())
      throw TransportError("embedding response has " + std::to_string(data.size()) +
                           " vectors for " + std::to_string(texts.size()) + " inputs");
    for (const auto& item : data) {
      size_t index = item.value("index", 0u);
      if (index >= out.size())
        throw TransportError("embedding response index out of range");
      out[index].values = item.at("embedding").get<std::vector<float>>();
    }
  } catch (const nlohmann::json::exception& ex) {
    throw TransportError(std::string("malformed embedding response: ") + ex.what());
  }

  for (const EmbeddingVector& vec : out) {
    if (vec.dim() == 0 || vec.dim() != out.front().dim())
      throw DimensionMismatch("embedding provider returned inconsistent dimensions");
  }
  return out;
}

}  // namespace discussrag
