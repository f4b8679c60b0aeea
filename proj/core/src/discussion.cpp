#include "discussrag/discussion.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "discussrag/hashing.hpp"

namespace discussrag {

namespace {

std::string strip_list_marker(const std::string& line) {
  size_t pos = 0;
  while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
  if (pos < line.size() && (line[pos] == '-' || line[pos] == '*')) {
    ++pos;
  } else {
    size_t digits = pos;
    while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits])))
      ++digits;
    if (digits > pos && digits < line.size() && (line[digits] == '.' || line[digits] == ')'))
      pos = digits + 1;
  }
  return trim(line.substr(pos));
}

// Parses "role | specialty" lines into profiles; returns nothing useful on
// duplicates or a short roster, leaving the caller to re-prompt.
struct RosterParse {
  std::vector<std::pair<std::string, std::string>> roles;
  std::string problem;
};

RosterParse parse_roster(const std::string& completion, int n) {
  RosterParse parsed;
  std::unordered_set<std::string> seen;

  size_t pos = 0;
  while (pos <= completion.size()) {
    size_t eol = completion.find('\n', pos);
    if (eol == std::string::npos) eol = completion.size();
    std::string line = strip_list_marker(completion.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty()) continue;

    std::string role = line;
    std::string specialty;
    if (size_t bar = line.find('|'); bar != std::string::npos) {
      role = trim(line.substr(0, bar));
      specialty = trim(line.substr(bar + 1));
    }
    if (role.empty()) continue;
    if (!seen.insert(to_lower(role)).second) continue;  // duplicates collapse
    parsed.roles.emplace_back(role, specialty);
  }

  if (parsed.roles.size() < static_cast<size_t>(n)) {
    parsed.problem = "only " + std::to_string(parsed.roles.size()) +
                     " distinct roles found, need " + std::to_string(n);
    parsed.roles.clear();
    return parsed;
  }
  parsed.roles.resize(n);
  return parsed;
}

std::string prev_summary_text(const RoundSummary& summary) {
  return summary.content.empty() ? "(none)" : summary.content;
}

bool all_declined(const std::vector<Insight>& insights) {
  return std::all_of(insights.begin(), insights.end(),
                     [](const Insight& insight) { return insight.declined; });
}

}  // namespace

std::string_view termination_reason_name(TerminationReason reason) {
  return reason == TerminationReason::all_declined ? "all_declined" : "max_rounds";
}

DiscussionEngine::DiscussionEngine(const PromptLibrary& prompts, std::string model_id)
    : prompts_(prompts), model_id_(std::move(model_id)) {}

std::vector<AgentProfile> DiscussionEngine::recruit(const Query& query, int n,
                                                    LlmGateway& gateway) const {
  if (n < 1) throw ConfigError("team size must be at least 1");

  ChatRequest request;
  request.model_id = model_id_;
  request.messages.push_back({Role::system, prompts_.text("recruiter_system")});
  request.messages.push_back(
      {Role::user, prompts_.render("recruiter", {{"query", query.stem},
                                                 {"n", std::to_string(n)}})});

  ChatCompletion completion = gateway.complete(request);
  RosterParse parsed = parse_roster(completion.content, n);
  if (parsed.roles.empty()) {
    request.messages.push_back({Role::assistant, completion.content});
    request.messages.push_back(
        {Role::user, prompts_.render("roster_correction", {{"problem", parsed.problem},
                                                           {"n", std::to_string(n)}})});
    completion = gateway.complete(request);
    parsed = parse_roster(completion.content, n);
    if (parsed.roles.empty())
      throw RosterParseError("recruiter roster unusable after retry: " + parsed.problem);
  }

  std::vector<AgentProfile> roster;
  roster.reserve(parsed.roles.size());
  for (const auto& [role, specialty] : parsed.roles) {
    AgentProfile profile;
    profile.role_name = role;
    profile.specialty = specialty.empty() ? role : specialty;
    profile.persona_prompt =
        prompts_.render("persona", {{"role_name", profile.role_name},
                                    {"specialty", profile.specialty},
                                    {"no_answer_rule", std::string(kNoAnswerRule)}});
    roster.push_back(std::move(profile));
  }
  return roster;
}

std::vector<Insight> DiscussionEngine::gather_insights(int round,
                                                       const std::vector<AgentProfile>& roster,
                                                       const RoundSummary& prev_summary,
                                                       const Query& query,
                                                       LlmGateway& gateway) const {
  if (round < 1) throw ConfigError("discussion rounds start at 1");
  if (prev_summary.round != round - 1)
    throw ConfigError("round " + std::to_string(round) + " must build on summary " +
                      std::to_string(round - 1));

  const std::string user_prompt =
      prompts_.render("expert", {{"query", query.stem},
                                 {"prev_summary", prev_summary_text(prev_summary)}});

  std::vector<Insight> insights;
  insights.reserve(roster.size());
  for (const AgentProfile& profile : roster) {
    Insight insight;
    insight.author = profile.role_name;
    insight.round = round;

    ChatRequest request;
    request.model_id = model_id_;
    request.messages.push_back({Role::system, profile.persona_prompt});
    request.messages.push_back({Role::user, user_prompt});

    try {
      const std::string content = trim(gateway.complete(request).content);
      if (content.empty() || content == kDeclineSentinel) {
        insight.declined = true;
      } else {
        insight.content = content;
      }
    } catch (const TransportError& ex) {
      insight.declined = true;
      insight.note = std::string("gateway error: ") + ex.what();
    } catch (const BackendRefusal& ex) {
      insight.declined = true;
      insight.note = std::string("gateway error: ") + ex.what();
    }
    insights.push_back(std::move(insight));
  }
  return insights;
}

RoundSummary DiscussionEngine::summarize_round(const std::vector<Insight>& insights,
                                               const RoundSummary& prev_summary,
                                               const Query& query, LlmGateway& gateway) const {
  std::string block;
  for (const Insight& insight : insights) {
    if (insight.declined) continue;
    if (!block.empty()) block += '\n';
    block += "[" + insight.author + "] " + insight.content;
  }
  if (block.empty())
    throw AllDeclined("cannot summarize a round in which every expert declined");

  ChatRequest request;
  request.model_id = model_id_;
  request.messages.push_back({Role::system, prompts_.render("summarizer_system",
                                                            {{"no_answer_rule",
                                                              std::string(kNoAnswerRule)}})});
  request.messages.push_back(
      {Role::user, prompts_.render("summarizer", {{"query", query.stem},
                                                  {"prev_summary",
                                                   prev_summary_text(prev_summary)},
                                                  {"insights", block}})});

  RoundSummary next;
  next.round = prev_summary.round + 1;
  next.content = gateway.complete(request).content;
  return next;
}

DiscussionOutcome DiscussionEngine::run_discussion(const Query& query,
                                                   const DiscussionConfig& config,
                                                   LlmGateway& gateway) const {
  if (config.n_experts < 1) throw ConfigError("team size must be at least 1");
  if (config.max_rounds < 0) throw ConfigError("max rounds must be non-negative");

  DiscussionOutcome outcome;
  outcome.transcript.roster = recruit(query, config.n_experts, gateway);
  outcome.transcript.summaries.push_back(RoundSummary{0, ""});
  outcome.transcript.termination_reason = TerminationReason::max_rounds;

  for (int round = 1; round <= config.max_rounds; ++round) {
    std::vector<Insight> insights = gather_insights(
        round, outcome.transcript.roster, outcome.transcript.summaries.back(), query, gateway);
    const bool declined_round = all_declined(insights);
    outcome.transcript.insights.insert(outcome.transcript.insights.end(),
                                       std::make_move_iterator(insights.begin()),
                                       std::make_move_iterator(insights.end()));
    if (declined_round) {
      outcome.transcript.termination_reason = TerminationReason::all_declined;
      break;
    }
    const size_t round_begin = outcome.transcript.insights.size() - config.n_experts;
    std::vector<Insight> round_view(outcome.transcript.insights.begin() + round_begin,
                                    outcome.transcript.insights.end());
    outcome.transcript.summaries.push_back(
        summarize_round(round_view, outcome.transcript.summaries.back(), query, gateway));
  }

  outcome.final_summary = outcome.transcript.summaries.back();
  return outcome;
}

DistilledSummary DiscussionEngine::verify_summary(const RoundSummary& final_summary,
                                                  const Query& query,
                                                  LlmGateway& gateway) const {
  ChatRequest request;
  request.model_id = model_id_;
  request.messages.push_back({Role::system, prompts_.render("verifier_system",
                                                            {{"no_answer_rule",
                                                              std::string(kNoAnswerRule)}})});
  request.messages.push_back(
      {Role::user, prompts_.render("verifier", {{"query", query.stem},
                                                {"summary", prev_summary_text(final_summary)}})});

  auto parse = [&](const std::string& content) -> std::optional<DistilledSummary> {
    const std::string trimmed = trim(content);
    size_t eol = trimmed.find('\n');
    const std::string first_line = trim(trimmed.substr(0, eol));
    const std::string rest = eol == std::string::npos ? "" : trim(trimmed.substr(eol + 1));

    DistilledSummary distilled;
    distilled.verified = true;
    if (first_line == "PASS" || first_line.rfind("PASS ", 0) == 0) {
      distilled.content = rest.empty() ? final_summary.content : rest;
      return distilled;
    }
    if (first_line.rfind("FAIL", 0) == 0) {
      std::string objection = trim(first_line.substr(4));
      while (!objection.empty() &&
             (objection.front() == ':' || objection.front() == '-' ||
              std::isspace(static_cast<unsigned char>(objection.front()))))
        objection.erase(objection.begin());
      objection = trim(objection);
      distilled.content = final_summary.content;
      distilled.verifier_notes = objection.empty() ? "(unspecified)" : objection;
      return distilled;
    }
    return std::nullopt;
  };

  ChatCompletion completion = gateway.complete(request);
  if (auto distilled = parse(completion.content)) return *distilled;

  request.messages.push_back({Role::assistant, completion.content});
  request.messages.push_back({Role::user, prompts_.text("verdict_correction")});
  completion = gateway.complete(request);
  if (auto distilled = parse(completion.content)) return *distilled;

  throw VerdictParseError("verifier reply did not start with PASS or FAIL after retry");
}

}  // namespace discussrag
