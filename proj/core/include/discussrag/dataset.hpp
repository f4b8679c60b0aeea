#pragma once

#include <filesystem>
#include <vector>

#include "discussrag/query.hpp"

namespace discussrag {

// One JSON object per line. Field mapping by kind:
//   mmlu_med / medqa_us / custom:
//     {"question": str, "options": {"A": str, ...}, "answer": label,
//      "id": str (optional)}
//   bioasq:    {"question": str, "answer": "yes"|"no", "id": optional}
//   pubmedqa:  {"question": str, "answer": "yes"|"no"|"maybe", "id": optional}
// Yes/no kinds get their fixed label set; missing ids default to
// "<kind>-<line>". Malformed lines are collected and reported together in
// one DatasetFormatError instead of being dropped.
std::vector<Query> load_dataset(const std::filesystem::path& path, DatasetKind kind);

}  // namespace discussrag
