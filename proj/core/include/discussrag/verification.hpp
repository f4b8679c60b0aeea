#pragma once

#include <string>
#include <vector>

#include "discussrag/discussion.hpp"
#include "discussrag/gateway.hpp"
#include "discussrag/prompts.hpp"
#include "discussrag/query.hpp"
#include "discussrag/vector_index.hpp"

namespace discussrag {

struct RetrievalVerdict {
  bool accepted = false;
  std::string rationale;
};

enum class AnswerStrategy { rag, cot_fallback };

std::string_view answer_strategy_name(AnswerStrategy strategy);
AnswerStrategy answer_strategy_from_name(std::string_view name);

struct Answer {
  std::string choice;  // a label from the query's options; empty if unparseable
  std::string raw_generation;
  AnswerStrategy strategy = AnswerStrategy::rag;
};

// No choice label could be parsed even after a correction re-prompt. Carries
// the generation so callers can record it instead of losing the text.
class AnswerParseError : public Error {
 public:
  AnswerParseError(std::string raw_generation, AnswerStrategy strategy)
      : Error("no option label found in the generation after retry"),
        raw_generation_(std::move(raw_generation)), strategy_(strategy) {}

  const std::string& raw_generation() const { return raw_generation_; }
  AnswerStrategy strategy() const { return strategy_; }

 private:
  std::string raw_generation_;
  AnswerStrategy strategy_;
};

// The post-retrieval gate and the two answer paths. A verdict covers the
// snippet set as a whole; rejection routes the query to the snippet-free
// chain-of-thought path.
class AnswerEngine {
 public:
  AnswerEngine(const PromptLibrary& prompts, std::string model_id);

  // Empty retrieval is rejected without any gateway call; otherwise the
  // reply's first word must be ACCEPT or REJECT, with one correction
  // re-prompt, so this makes at most 2 calls.
  RetrievalVerdict judge_snippets(const DistilledSummary& distilled, const Query& query,
                                  const std::vector<Snippet>& snippets,
                                  LlmGateway& gateway) const;

  Answer answer_with_context(const Query& query, const std::vector<Snippet>& snippets,
                             LlmGateway& gateway) const;

  Answer answer_with_cot(const Query& query, LlmGateway& gateway) const;

  // Numbered snippet block as it appears in prompts, "(none)" when empty.
  static std::string render_snippets(const std::vector<Snippet>& snippets);

 private:
  Answer generate_answer(ChatRequest request, const Query& query,
                         AnswerStrategy strategy, LlmGateway& gateway) const;

  const PromptLibrary& prompts_;
  std::string model_id_;
};

}  // namespace discussrag
