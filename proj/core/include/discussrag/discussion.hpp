#pragma once

#include <string>
#include <vector>

#include "discussrag/gateway.hpp"
#include "discussrag/prompts.hpp"
#include "discussrag/query.hpp"

namespace discussrag {

struct AgentProfile {
  std::string role_name;
  std::string specialty;
  std::string persona_prompt;
};

struct Insight {
  std::string author;  // role_name
  int round = 1;
  std::string content;
  bool declined = false;
  // Set when a failed gateway call was downgraded to a decline.
  std::string note;
};

struct RoundSummary {
  int round = 0;
  std::string content;  // round 0 is the empty starting summary
};

struct DiscussionConfig {
  int n_experts = 3;
  int max_rounds = 3;
};

struct DistilledSummary {
  std::string content;
  bool verified = false;
  std::string verifier_notes;
};

enum class TerminationReason { max_rounds, all_declined };

std::string_view termination_reason_name(TerminationReason reason);

struct DiscussionTranscript {
  std::vector<AgentProfile> roster;
  std::vector<Insight> insights;
  std::vector<RoundSummary> summaries;  // rounds 0..J, contiguous
  TerminationReason termination_reason = TerminationReason::max_rounds;
};

struct DiscussionOutcome {
  RoundSummary final_summary;
  DiscussionTranscript transcript;
};

// The brainstorm loop: a recruiter assembles expert personas, each round
// every expert contributes an insight (or declines), a summarizer folds the
// round into the running summary, and a verifier distills the final summary.
// Discussion prompts see only the question stem, never the answer options.
class DiscussionEngine {
 public:
  DiscussionEngine(const PromptLibrary& prompts, std::string model_id);

  std::vector<AgentProfile> recruit(const Query& query, int n, LlmGateway& gateway) const;

  // One insight per roster member, in roster order. A failed gateway call
  // or a decline-sentinel reply yields declined = true; the round goes on.
  std::vector<Insight> gather_insights(int round, const std::vector<AgentProfile>& roster,
                                       const RoundSummary& prev_summary, const Query& query,
                                       LlmGateway& gateway) const;

  // Folds the round's non-declined insights and the previous summary into
  // the next summary. The completion text is taken verbatim.
  RoundSummary summarize_round(const std::vector<Insight>& insights,
                               const RoundSummary& prev_summary, const Query& query,
                               LlmGateway& gateway) const;

  // Runs rounds 1..max_rounds, stopping early when a whole round declines.
  // A declined round produces no summary.
  DiscussionOutcome run_discussion(const Query& query, const DiscussionConfig& config,
                                   LlmGateway& gateway) const;

  // PASS verdicts yield the verifier's distilled rewrite; FAIL verdicts fall
  // back to the raw summary with the objection recorded. Both paths emit a
  // verified summary so the pipeline always proceeds.
  DistilledSummary verify_summary(const RoundSummary& final_summary, const Query& query,
                                  LlmGateway& gateway) const;

 private:
  const PromptLibrary& prompts_;
  std::string model_id_;
};

}  // namespace discussrag
