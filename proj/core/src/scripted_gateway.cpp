#include "discussrag/scripted_gateway.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "discussrag/hashing.hpp"

namespace discussrag {

namespace {

// Uniform double in [-1, 1) from the top 53 bits of the engine output.
double unit_component(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace

HashingEmbedder::HashingEmbedder(uint32_t dim, uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim_ == 0) throw ConfigError("embedding dimension must be positive");
}

std::string HashingEmbedder::id() const {
  return "hash64-d" + std::to_string(dim_) + "-s" + std::to_string(seed_);
}

EmbeddingVector HashingEmbedder::embed_one(std::string_view text) const {
  std::vector<double> acc(dim_, 0.0);
  size_t tokens = 0;

  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
    size_t begin = i;
    while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
    if (i == begin) break;
    std::string token = to_lower(text.substr(begin, i - begin));
    std::mt19937_64 rng(fnv1a64(token) ^ seed_);
    for (uint32_t d = 0; d < dim_; ++d) acc[d] += unit_component(rng);
    ++tokens;
  }

  if (tokens == 0) {
    // No alphanumeric content: fall back to hashing the raw text.
    std::mt19937_64 rng(fnv1a64(text) ^ seed_);
    for (uint32_t d = 0; d < dim_; ++d) acc[d] = unit_component(rng);
  }

  double norm_sq = 0.0;
  for (double v : acc) norm_sq += v * v;
  if (norm_sq == 0.0) {
    acc[0] = 1.0;
    norm_sq = 1.0;
  }
  const double inv_norm = 1.0 / std::sqrt(norm_sq);

  EmbeddingVector out;
  out.values.resize(dim_);
  for (uint32_t d = 0; d < dim_; ++d)
    out.values[d] = static_cast<float>(acc[d] * inv_norm);
  return out;
}

std::vector<FixtureEntry> load_fixture_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open fixture file: " + path.string());

  std::vector<FixtureEntry> entries;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError("fixture " + path.string() + " line " + std::to_string(line_no) +
                        ": " + ex.what());
    }
    FixtureEntry entry;
    entry.fingerprint = record.value("fingerprint", "*");
    entry.content = record.value("content", "");
    entry.finish_reason = finish_reason_from_name(record.value("finish_reason", "stop"));
    entries.push_back(std::move(entry));
  }
  return entries;
}

void save_fixture_file(const std::filesystem::path& path, const std::vector<FixtureEntry>& entries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write fixture file: " + path.string());
  for (const FixtureEntry& entry : entries) {
    nlohmann::json record = {
        {"fingerprint", entry.fingerprint},
        {"content", entry.content},
        {"finish_reason", std::string(finish_reason_name(entry.finish_reason))},
    };
    out << record.dump() << '\n';
  }
}

ScriptedGateway::ScriptedGateway(std::vector<FixtureEntry> entries, uint32_t embed_dim,
                                 uint64_t embed_seed)
    : embedder_(embed_dim, embed_seed), entries_(std::move(entries)),
      consumed_(entries_.size(), false) {
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].finish_reason == FinishReason::stop && entries_[i].content.empty())
      throw ConfigError("fixture entry " + std::to_string(i) +
                        " has empty content with finish_reason stop");
  }
}

ScriptedGateway ScriptedGateway::from_file(const std::filesystem::path& path, uint32_t embed_dim,
                                           uint64_t embed_seed) {
  return ScriptedGateway(load_fixture_file(path), embed_dim, embed_seed);
}

ChatCompletion ScriptedGateway::complete(const ChatRequest& request) {
  request.validate();
  std::lock_guard<std::mutex> lock(mutex_);
  request_log_.push_back(request);

  const std::string fp = request_fingerprint(request);
  size_t match = entries_.size();
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (!consumed_[i] && entries_[i].fingerprint == fp) {
      match = i;
      break;
    }
  }
  if (match == entries_.size()) {
    for (size_t i = 0; i < entries_.size(); ++i) {
      if (!consumed_[i] && entries_[i].fingerprint == "*") {
        match = i;
        break;
      }
    }
  }
  if (match == entries_.size()) {
    std::string last_user;
    for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
      if (it->role == Role::user) {
        last_user = it->content.substr(0, 120);
        break;
      }
    }
    throw FixtureExhausted("no fixture entry for request #" +
                           std::to_string(request_log_.size()) + " (fingerprint " + fp +
                           ", last user message: \"" + last_user + "\")");
  }

  consumed_[match] = true;
  const FixtureEntry& entry = entries_[match];
  if (entry.finish_reason == FinishReason::error)
    throw TransportError(entry.content.empty() ? "injected transport failure" : entry.content);
  return ChatCompletion{entry.content, entry.finish_reason, {}};
}

std::vector<EmbeddingVector> ScriptedGateway::embed(const std::vector<std::string>& texts) {
  validate_embed_inputs(texts);
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) out.push_back(embedder_.embed_one(text));
  return out;
}

size_t ScriptedGateway::entries_consumed() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return static_cast<size_t>(std::count(consumed_.begin(), consumed_.end(), true));
}

size_t ScriptedGateway::entries_remaining() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size() - static_cast<size_t>(std::count(consumed_.begin(), consumed_.end(), true));
}

}  // namespace discussrag
