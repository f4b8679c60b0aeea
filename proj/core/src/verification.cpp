#include "discussrag/verification.hpp"

#include <cctype>

#include "discussrag/answer_extract.hpp"
#include "discussrag/hashing.hpp"

namespace discussrag {

namespace {

std::string render_options(const Query& query) {
  std::string out;
  for (const auto& [label, text] : query.options) {
    if (!out.empty()) out += '\n';
    out += "(" + label + ") " + text;
  }
  return out;
}

// Leading alphabetic word of the reply, uppercased.
std::string first_word_upper(const std::string& content) {
  size_t begin = 0;
  while (begin < content.size() && !std::isalpha(static_cast<unsigned char>(content[begin])))
    ++begin;
  size_t end = begin;
  while (end < content.size() && std::isalpha(static_cast<unsigned char>(content[end]))) ++end;
  std::string word = content.substr(begin, end - begin);
  for (char& c : word) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return word;
}

// Everything after the leading verdict word, separators stripped, first
// line only.
std::string rationale_after(const std::string& content) {
  size_t pos = 0;
  while (pos < content.size() && !std::isalpha(static_cast<unsigned char>(content[pos]))) ++pos;
  while (pos < content.size() && std::isalpha(static_cast<unsigned char>(content[pos]))) ++pos;
  std::string rest = content.substr(pos);
  bool stripping = true;
  while (stripping && !rest.empty()) {
    stripping = false;
    const char front = rest.front();
    if (front == ':' || front == '-' || front == ',' ||
        std::isspace(static_cast<unsigned char>(front))) {
      rest.erase(rest.begin());
      stripping = true;
    } else if (rest.rfind("\xe2\x80\x94", 0) == 0 || rest.rfind("\xe2\x80\x93", 0) == 0) {
      rest.erase(0, 3);  // em dash / en dash separators
      stripping = true;
    }
  }
  if (size_t eol = rest.find('\n'); eol != std::string::npos) rest = rest.substr(0, eol);
  rest = trim(rest);
  return rest.empty() ? "(none given)" : rest;
}

}  // namespace

std::string_view answer_strategy_name(AnswerStrategy strategy) {
  return strategy == AnswerStrategy::rag ? "rag" : "cot_fallback";
}

AnswerStrategy answer_strategy_from_name(std::string_view name) {
  if (name == "rag") return AnswerStrategy::rag;
  if (name == "cot_fallback") return AnswerStrategy::cot_fallback;
  throw ConfigError("unknown answer strategy: " + std::string(name));
}

AnswerEngine::AnswerEngine(const PromptLibrary& prompts, std::string model_id)
    : prompts_(prompts), model_id_(std::move(model_id)) {}

std::string AnswerEngine::render_snippets(const std::vector<Snippet>& snippets) {
  if (snippets.empty()) return "(none)";
  std::string out;
  for (size_t i = 0; i < snippets.size(); ++i) {
    if (!out.empty()) out += '\n';
    out += "[" + std::to_string(i + 1) + "] " + snippets[i].text;
  }
  return out;
}

RetrievalVerdict AnswerEngine::judge_snippets(const DistilledSummary& distilled,
                                              const Query& query,
                                              const std::vector<Snippet>& snippets,
                                              LlmGateway& gateway) const {
  if (snippets.empty()) return RetrievalVerdict{false, "no snippets retrieved"};

  ChatRequest request;
  request.model_id = model_id_;
  request.messages.push_back({Role::system, prompts_.text("judge_system")});
  request.messages.push_back(
      {Role::user,
       prompts_.render("judge", {{"query", query.stem},
                                 {"distilled",
                                  distilled.content.empty() ? "(none)" : distilled.content},
                                 {"snippets", render_snippets(snippets)}})});

  auto parse = [](const std::string& content) -> std::optional<RetrievalVerdict> {
    const std::string trimmed = trim(content);
    const std::string word = first_word_upper(trimmed);
    if (word == "ACCEPT") return RetrievalVerdict{true, rationale_after(trimmed)};
    if (word == "REJECT") return RetrievalVerdict{false, rationale_after(trimmed)};
    return std::nullopt;
  };

  ChatCompletion completion = gateway.complete(request);
  if (auto verdict = parse(completion.content)) return *verdict;

  request.messages.push_back({Role::assistant, completion.content});
  request.messages.push_back({Role::user, prompts_.text("judge_correction")});
  completion = gateway.complete(request);
  if (auto verdict = parse(completion.content)) return *verdict;

  throw VerdictParseError("snippet verdict did not begin with ACCEPT or REJECT after retry");
}

Answer AnswerEngine::generate_answer(ChatRequest request, const Query& query,
                                     AnswerStrategy strategy, LlmGateway& gateway) const {
  ChatCompletion completion = gateway.complete(request);
  if (auto choice = extract_choice(completion.content, query))
    return Answer{*choice, completion.content, strategy};

  request.messages.push_back({Role::assistant, completion.content});
  request.messages.push_back({Role::user, prompts_.text("answer_correction")});
  completion = gateway.complete(request);
  if (auto choice = extract_choice(completion.content, query))
    return Answer{*choice, completion.content, strategy};

  throw AnswerParseError(completion.content, strategy);
}

Answer AnswerEngine::answer_with_context(const Query& query,
                                         const std::vector<Snippet>& snippets,
                                         LlmGateway& gateway) const {
  ChatRequest request;
  request.model_id = model_id_;
  request.messages.push_back({Role::system, prompts_.text("answer_context_system")});
  request.messages.push_back(
      {Role::user, prompts_.render("answer_context", {{"snippets", render_snippets(snippets)},
                                                      {"question", query.stem},
                                                      {"options", render_options(query)}})});
  return generate_answer(std::move(request), query, AnswerStrategy::rag, gateway);
}

Answer AnswerEngine::answer_with_cot(const Query& query, LlmGateway& gateway) const {
  ChatRequest request;
  request.model_id = model_id_;
  request.messages.push_back({Role::system, prompts_.text("answer_cot_system")});
  request.messages.push_back(
      {Role::user, prompts_.render("answer_cot", {{"question", query.stem},
                                                  {"options", render_options(query)}})});
  return generate_answer(std::move(request), query, AnswerStrategy::cot_fallback, gateway);
}

}  // namespace discussrag
