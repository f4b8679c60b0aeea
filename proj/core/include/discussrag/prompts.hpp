#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "discussrag/errors.hpp"

namespace discussrag {

// An expert signals it has nothing left to contribute by replying with
// exactly this line.
inline constexpr std::string_view kDeclineSentinel = "NO FURTHER INPUT";

// Injected into every discussion-phase system prompt: the brainstorm
// produces background knowledge, never the final answer.
inline constexpr std::string_view kNoAnswerRule =
    "Do not answer the original question or state a final conclusion; "
    "contribute background knowledge only.";

// Named prompt templates with {placeholder} substitution. Ships with a
// complete built-in set; a template directory overrides individual
// templates by file name ("<name>.txt").
class PromptLibrary {
 public:
  static PromptLibrary defaults();
  static PromptLibrary from_dir(const std::filesystem::path& dir);

  const std::string& text(const std::string& name) const;
  bool has(const std::string& name) const { return templates_.count(name) > 0; }

  // Replaces each {key} present in `values`; unknown placeholders are left
  // verbatim. Substituted values are not re-scanned.
  std::string render(const std::string& name,
                     const std::map<std::string, std::string>& values) const;

  std::vector<std::string> names() const;

  // Stable hash over all template names and contents, recorded in run
  // manifests so prompt drift is visible across runs.
  std::string fingerprint() const;

 private:
  std::map<std::string, std::string> templates_;
};

}  // namespace discussrag
