#include "discussrag/trace_io.hpp"

#include "discussrag/hashing.hpp"

namespace discussrag {

namespace {

nlohmann::json snippet_to_json(const Snippet& snippet) {
  return {{"chunk_id", snippet.chunk_id},
          {"doc_id", snippet.doc_id},
          {"title", snippet.title},
          {"text", snippet.text},
          {"score", snippet.score}};
}

nlohmann::json transcript_to_json(const DiscussionTranscript& transcript) {
  nlohmann::json roster = nlohmann::json::array();
  for (const AgentProfile& profile : transcript.roster)
    roster.push_back({{"role_name", profile.role_name},
                      {"specialty", profile.specialty},
                      {"persona_prompt", profile.persona_prompt}});

  nlohmann::json insights = nlohmann::json::array();
  for (const Insight& insight : transcript.insights) {
    nlohmann::json item = {{"author", insight.author},
                           {"round", insight.round},
                           {"content", insight.content},
                           {"declined", insight.declined}};
    if (!insight.note.empty()) item["note"] = insight.note;
    insights.push_back(std::move(item));
  }

  nlohmann::json summaries = nlohmann::json::array();
  for (const RoundSummary& summary : transcript.summaries)
    summaries.push_back({{"round", summary.round}, {"content", summary.content}});

  return {{"roster", std::move(roster)},
          {"insights", std::move(insights)},
          {"summaries", std::move(summaries)},
          {"termination_reason",
           std::string(termination_reason_name(transcript.termination_reason))}};
}

}  // namespace

nlohmann::json trace_to_json(const PipelineTrace& trace) {
  nlohmann::json out = {
      {"schema", "trace_v1"},
      {"query_id", trace.query_id},
      {"mode", std::string(pipeline_mode_name(trace.mode))},
      {"retrieval_query_text", trace.retrieval_query_text},
      {"gateway_call_count", trace.gateway_call_count},
      {"embed_call_count", trace.embed_call_count},
      {"timings_ms", trace.timings_ms},
  };

  if (trace.transcript) out["transcript"] = transcript_to_json(*trace.transcript);
  if (trace.distilled)
    out["distilled"] = {{"content", trace.distilled->content},
                        {"verified", trace.distilled->verified},
                        {"verifier_notes", trace.distilled->verifier_notes}};
  if (trace.snippets) {
    nlohmann::json snippets = nlohmann::json::array();
    for (const Snippet& snippet : *trace.snippets) snippets.push_back(snippet_to_json(snippet));
    out["snippets"] = std::move(snippets);
  }
  if (trace.verdict)
    out["verdict"] = {{"accepted", trace.verdict->accepted},
                      {"rationale", trace.verdict->rationale}};
  if (trace.answer)
    out["answer"] = {{"choice", trace.answer->choice},
                     {"raw_generation", trace.answer->raw_generation},
                     {"strategy", std::string(answer_strategy_name(trace.answer->strategy))}};
  if (!trace.error.empty()) out["error"] = trace.error;
  return out;
}

TraceWriter::TraceWriter(const std::filesystem::path& path)
    : out_(path, std::ios::trunc) {
  if (!out_) throw ConfigError("cannot open trace file for writing: " + path.string());
}

void TraceWriter::write(const PipelineTrace& trace) {
  out_ << trace_to_json(trace).dump() << '\n';
  out_.flush();
}

std::vector<nlohmann::json> load_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file: " + path.string());

  std::vector<nlohmann::json> traces;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      traces.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError("trace " + path.string() + " line " + std::to_string(line_no) + ": " +
                        ex.what());
    }
  }
  return traces;
}

}  // namespace discussrag
