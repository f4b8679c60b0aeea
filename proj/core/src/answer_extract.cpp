#include "discussrag/answer_extract.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "discussrag/hashing.hpp"

namespace discussrag {

namespace {

std::optional<std::string> match_label(const Query& query, const std::string& token) {
  const std::string lowered = to_lower(token);
  for (const auto& [label, _] : query.options)
    if (to_lower(label) == lowered) return label;
  return std::nullopt;
}

// "(B)" -> "B", "B." -> "B", "(yes)." -> "yes"
std::string strip_wrapping(std::string token) {
  while (!token.empty() && (token.back() == '.' || token.back() == ')')) token.pop_back();
  while (!token.empty() && token.front() == '(') token.erase(token.begin());
  return trim(token);
}

}  // namespace

std::optional<std::string> extract_choice(const std::string& raw, const Query& query) {
  static const std::regex answer_pattern(R"(answer\s*:\s*\(?\s*([A-Za-z]+))",
                                         std::regex::icase);

  std::optional<std::string> found;
  for (auto it = std::sregex_iterator(raw.begin(), raw.end(), answer_pattern);
       it != std::sregex_iterator(); ++it) {
    if (auto label = match_label(query, (*it)[1].str())) found = label;
  }
  if (found) return found;

  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos <= raw.size()) {
    size_t eol = raw.find('\n', pos);
    if (eol == std::string::npos) eol = raw.size();
    lines.push_back(raw.substr(pos, eol - pos));
    pos = eol + 1;
  }
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    const std::string token = strip_wrapping(trim(*it));
    if (token.empty()) continue;
    if (auto label = match_label(query, token)) return label;
  }

  // Bare-word matching is safe only when no label could collide with
  // ordinary prose, so it is reserved for word labels like yes/no/maybe.
  const bool word_labels = !query.options.empty() &&
                           std::all_of(query.options.begin(), query.options.end(),
                                       [](const auto& option) {
                                         return option.first.size() >= 2;
                                       });
  if (word_labels) {
    size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && !std::isalnum(static_cast<unsigned char>(raw[i]))) ++i;
      size_t begin = i;
      while (i < raw.size() && std::isalnum(static_cast<unsigned char>(raw[i]))) ++i;
      if (i == begin) break;
      if (auto label = match_label(query, raw.substr(begin, i - begin))) found = label;
    }
  }
  return found;
}

}  // namespace discussrag
