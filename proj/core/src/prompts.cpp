#include "discussrag/prompts.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "discussrag/hashing.hpp"

namespace discussrag {

namespace {

const std::map<std::string, std::string>& default_templates() {
  static const std::map<std::string, std::string> templates = {
      {"recruiter_system",
       "You assemble a panel of domain experts to brainstorm background knowledge "
       "for a medical question. You never answer the question itself."},

      {"recruiter",
       "Question:\n{query}\n\n"
       "Recruit exactly {n} experts whose combined perspectives would surface the "
       "background knowledge needed to research this question. Reply with one "
       "expert per line in the form:\n"
       "role | specialty\n"
       "Use distinct roles and add no other commentary."},

      {"roster_correction",
       "That roster could not be used: {problem}\n"
       "Reply again with exactly {n} experts with distinct roles, one per line, "
       "in the form: role | specialty"},

      {"persona",
       "You are a {role_name} with deep expertise in {specialty}, taking part in "
       "a panel brainstorm about a medical question. {no_answer_rule}"},

      {"expert",
       "Question under discussion:\n{query}\n\n"
       "Summary of the discussion so far:\n{prev_summary}\n\n"
       "Contribute one focused piece of background knowledge from your specialty "
       "that the summary does not yet cover. If you have nothing further to add, "
       "reply with exactly: NO FURTHER INPUT"},

      {"summarizer_system",
       "You maintain the running summary of a panel brainstorm, folding each "
       "round of contributions into the previous summary. Keep the summary "
       "faithful, compact, and self-contained. {no_answer_rule}"},

      {"summarizer",
       "Question under discussion:\n{query}\n\n"
       "Previous summary:\n{prev_summary}\n\n"
       "New contributions this round:\n{insights}\n\n"
       "Write the updated summary, integrating the contributions with the "
       "previous summary. Output only the summary text."},

      {"verifier_system",
       "You check the final summary of a panel brainstorm for internal "
       "consistency and for sufficiency as background to research the question, "
       "then distill it. {no_answer_rule}"},

      {"verifier",
       "Question:\n{query}\n\n"
       "Final summary of the discussion:\n{summary}\n\n"
       "Reply with PASS on the first line if the summary is consistent and "
       "sufficient background for researching the question, or FAIL: followed by "
       "a short objection. After a PASS line, write the distilled summary: the "
       "same facts rewritten compactly for use as retrieval background."},

      {"verdict_correction",
       "That reply did not start with PASS or FAIL. Reply again: first line "
       "PASS, or FAIL: followed by your objection. After a PASS line, write the "
       "distilled summary."},

      {"judge_system",
       "You review whether retrieved text snippets actually support answering a "
       "question, judging the set as a whole."},

      {"judge",
       "Question:\n{query}\n\n"
       "Background summary:\n{distilled}\n\n"
       "Retrieved snippets:\n{snippets}\n\n"
       "Do these snippets, taken together, give relevant and sufficient "
       "grounding to answer the question? Reply with ACCEPT or REJECT as the "
       "first word, followed by a one-line rationale."},

      {"judge_correction",
       "That reply did not begin with ACCEPT or REJECT. Reply again with ACCEPT "
       "or REJECT as the first word, followed by your rationale."},

      {"answer_context_system",
       "You answer multiple-choice medical questions using the provided snippets "
       "as context. Think briefly, then finish with a line of the form "
       "Answer: (X)."},

      {"answer_context",
       "Context snippets:\n{snippets}\n\n"
       "Question:\n{question}\n\n"
       "Options:\n{options}\n\n"
       "Use the context where it helps. Finish your reply with a line:\n"
       "Answer: (X)\n"
       "where X is one of the option labels."},

      {"answer_cot_system",
       "You answer multiple-choice medical questions by reasoning step by step "
       "from your own knowledge. Finish with a line of the form Answer: (X)."},

      {"answer_cot",
       "Question:\n{question}\n\n"
       "Options:\n{options}\n\n"
       "Think step by step, then finish your reply with a line:\n"
       "Answer: (X)\n"
       "where X is one of the option labels."},

      {"answer_correction",
       "That reply did not end with a readable final answer. Reply again and "
       "finish with a line:\nAnswer: (X)\nwhere X is one of the option labels."},
  };
  return templates;
}

}  // namespace

PromptLibrary PromptLibrary::defaults() {
  PromptLibrary lib;
  lib.templates_ = default_templates();
  return lib;
}

PromptLibrary PromptLibrary::from_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw ConfigError("template directory does not exist: " + dir.string());

  PromptLibrary lib = defaults();
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path());
    if (!in) throw ConfigError("cannot read template file: " + entry.path().string());
    std::ostringstream content;
    content << in.rdbuf();
    lib.templates_[entry.path().stem().string()] = content.str();
  }
  return lib;
}

const std::string& PromptLibrary::text(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw ConfigError("unknown prompt template: " + name);
  return it->second;
}

std::string PromptLibrary::render(const std::string& name,
                                  const std::map<std::string, std::string>& values) const {
  const std::string& source = text(name);
  std::string out;
  out.reserve(source.size());

  size_t pos = 0;
  while (pos < source.size()) {
    const size_t open = source.find('{', pos);
    if (open == std::string::npos) {
      out.append(source, pos, std::string::npos);
      break;
    }
    out.append(source, pos, open - pos);
    const size_t close = source.find('}', open + 1);
    if (close == std::string::npos) {
      out.append(source, open, std::string::npos);
      break;
    }
    const std::string key = source.substr(open + 1, close - open - 1);
    auto it = values.find(key);
    if (it != values.end()) {
      out += it->second;
    } else {
      out.append(source, open, close - open + 1);
    }
    pos = close + 1;
  }
  return out;
}

std::vector<std::string> PromptLibrary::names() const {
  std::vector<std::string> out;
  out.reserve(templates_.size());
  for (const auto& [name, _] : templates_) out.push_back(name);
  return out;
}

std::string PromptLibrary::fingerprint() const {
  uint64_t state = kFnvOffset;
  for (const auto& [name, content] : templates_) {
    state = fnv1a64(name, state);
    state = fnv1a64_byte(0x1f, state);
    state = fnv1a64(content, state);
    state = fnv1a64_byte(0x1e, state);
  }
  return to_hex16(state);
}

}  // namespace discussrag
