#pragma once

#include <optional>
#include <string>

#include "discussrag/query.hpp"

namespace discussrag {

// Pulls the chosen option label out of a free-form generation:
//   1. the last "Answer: (X)" / "Answer: X" whose X is a valid label;
//   2. otherwise the last line consisting solely of a valid label;
//   3. otherwise, for label sets made of words (yes/no/maybe), the last
//      standalone occurrence of a label word, case-insensitive.
// Returns the label spelled as in the query's options, or nothing.
std::optional<std::string> extract_choice(const std::string& raw, const Query& query);

}  // namespace discussrag
