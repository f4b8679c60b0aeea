#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "discussrag/discussion.hpp"
#include "discussrag/gateway.hpp"
#include "discussrag/prompts.hpp"
#include "discussrag/query.hpp"
#include "discussrag/vector_index.hpp"
#include "discussrag/verification.hpp"

namespace discussrag {

enum class PipelineMode { discuss_rag, baseline_rag };

std::string_view pipeline_mode_name(PipelineMode mode);
PipelineMode pipeline_mode_from_name(std::string_view name);

struct PipelineConfig {
  PipelineMode mode = PipelineMode::discuss_rag;
  size_t k = 5;
  DiscussionConfig discussion;  // ignored in baseline mode
  std::string model_id = "gpt-3.5-turbo-0125";
  std::string template_dir;  // empty: built-in templates
  std::string index_path;
};

// Everything one query went through, stage by stage. The discussion-phase
// fields are engaged only in discuss mode; baseline traces never carry a
// transcript or a verdict. Timings are zeroed under a deterministic
// backend so repeated runs serialize identically.
struct PipelineTrace {
  std::string query_id;
  PipelineMode mode = PipelineMode::discuss_rag;
  std::optional<DiscussionTranscript> transcript;
  std::optional<DistilledSummary> distilled;
  std::string retrieval_query_text;
  std::optional<std::vector<Snippet>> snippets;
  std::optional<RetrievalVerdict> verdict;
  std::optional<Answer> answer;
  std::map<std::string, double> timings_ms;
  int gateway_call_count = 0;  // chat completions only
  int embed_call_count = 0;
  std::string error;  // non-empty when a stage failed and no answer exists
};

struct PipelineResult {
  std::optional<Answer> answer;
  PipelineTrace trace;
};

// Counts traffic passing through to the wrapped backend, so every trace
// can report its gateway budget.
class CountingGateway : public LlmGateway {
 public:
  explicit CountingGateway(LlmGateway& inner) : inner_(inner) {}

  ChatCompletion complete(const ChatRequest& request) override {
    ++completions_;
    return inner_.complete(request);
  }
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
    ++embeds_;
    return inner_.embed(texts);
  }
  std::string backend_id() const override { return inner_.backend_id(); }
  std::string embedder_id() const override { return inner_.embedder_id(); }
  std::optional<uint32_t> embedding_dim() const override { return inner_.embedding_dim(); }
  bool deterministic() const override { return inner_.deterministic(); }

  int completions() const { return completions_; }
  int embeds() const { return embeds_; }

 private:
  LlmGateway& inner_;
  int completions_ = 0;
  int embeds_ = 0;
};

// "QUESTION: {stem}\nBACKGROUND: {distilled}"; with no distilled content
// the text degrades to the bare stem, identical to baseline retrieval.
std::string build_retrieval_text(const Query& query, const DistilledSummary& distilled);

// Runs one query through the configured flow:
//   discuss mode: brainstorm -> distill -> enriched retrieval -> gate ->
//                 grounded answer, or chain-of-thought on rejection;
//   baseline mode: stem-only retrieval -> grounded answer, no agents.
// Stage errors are captured in the trace rather than thrown, so a batch
// run continues past a failed query.
class Pipeline {
 public:
  Pipeline(const PromptLibrary& prompts, PipelineConfig config);

  PipelineResult answer_query(const Query& query, const VectorIndex& index,
                              LlmGateway& gateway) const;

  const PipelineConfig& config() const { return config_; }

 private:
  const PromptLibrary& prompts_;
  PipelineConfig config_;
};

}  // namespace discussrag
