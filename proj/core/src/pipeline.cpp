#include "discussrag/pipeline.hpp"

#include <chrono>

#include "discussrag/hashing.hpp"

namespace discussrag {

namespace {

class StageClock {
 public:
  explicit StageClock(std::map<std::string, double>& timings) : timings_(timings) {}

  template <typename Fn>
  auto time(const char* stage, Fn&& fn) {
    const auto begin = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record(stage, begin);
    } else {
      auto result = fn();
      record(stage, begin);
      return result;
    }
  }

 private:
  void record(const char* stage, std::chrono::steady_clock::time_point begin) {
    const auto elapsed = std::chrono::steady_clock::now() - begin;
    timings_[stage] =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();
  }

  std::map<std::string, double>& timings_;
};

}  // namespace

std::string_view pipeline_mode_name(PipelineMode mode) {
  return mode == PipelineMode::discuss_rag ? "discuss_rag" : "baseline_rag";
}

PipelineMode pipeline_mode_from_name(std::string_view name) {
  if (name == "discuss_rag") return PipelineMode::discuss_rag;
  if (name == "baseline_rag") return PipelineMode::baseline_rag;
  throw ConfigError("unknown pipeline mode: " + std::string(name));
}

std::string build_retrieval_text(const Query& query, const DistilledSummary& distilled) {
  if (trim(distilled.content).empty()) return query.stem;
  return "QUESTION: " + query.stem + "\nBACKGROUND: " + distilled.content;
}

Pipeline::Pipeline(const PromptLibrary& prompts, PipelineConfig config)
    : prompts_(prompts), config_(std::move(config)) {}

PipelineResult Pipeline::answer_query(const Query& query, const VectorIndex& index,
                                      LlmGateway& gateway) const {
  CountingGateway counting(gateway);

  PipelineResult result;
  PipelineTrace& trace = result.trace;
  trace.query_id = query.query_id;
  trace.mode = config_.mode;
  StageClock clock(trace.timings_ms);

  try {
    DistilledSummary distilled;  // stays empty in baseline mode
    if (config_.mode == PipelineMode::discuss_rag) {
      DiscussionEngine discussion(prompts_, config_.model_id);
      DiscussionOutcome outcome = clock.time("discussion", [&] {
        return discussion.run_discussion(query, config_.discussion, counting);
      });
      trace.transcript = std::move(outcome.transcript);
      distilled = clock.time("distill", [&] {
        return discussion.verify_summary(outcome.final_summary, query, counting);
      });
      trace.distilled = distilled;
    }

    trace.retrieval_query_text = build_retrieval_text(query, distilled);
    std::vector<Snippet> snippets = clock.time("retrieval", [&] {
      EmbeddingVector query_vec = counting.embed({trace.retrieval_query_text}).front();
      return retrieve_top_k(index, query_vec, config_.k);
    });
    trace.snippets = snippets;

    AnswerEngine answers(prompts_, config_.model_id);
    if (config_.mode == PipelineMode::discuss_rag) {
      RetrievalVerdict verdict = clock.time("verdict", [&] {
        return answers.judge_snippets(distilled, query, snippets, counting);
      });
      trace.verdict = verdict;
      trace.answer = clock.time("answer", [&]() -> Answer {
        if (verdict.accepted) return answers.answer_with_context(query, snippets, counting);
        return answers.answer_with_cot(query, counting);
      });
    } else {
      trace.answer = clock.time("answer", [&] {
        return answers.answer_with_context(query, snippets, counting);
      });
    }
    result.answer = trace.answer;
  } catch (const AnswerParseError& ex) {
    // The generation exists but no option label could be read from it;
    // record it as an (incorrect) answer rather than an infrastructure
    // failure so scoring denominators stay stable.
    trace.answer = Answer{"", ex.raw_generation(), ex.strategy()};
    result.answer = trace.answer;
  } catch (const FixtureExhausted&) {
    throw;  // a broken fixture must fail the run, not hide in a trace
  } catch (const Error& ex) {
    trace.error = ex.what();
  }

  trace.gateway_call_count = counting.completions();
  trace.embed_call_count = counting.embeds();
  if (gateway.deterministic())
    for (auto& [_, ms] : trace.timings_ms) ms = 0.0;
  return result;
}

}  // namespace discussrag
