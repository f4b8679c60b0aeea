#include "discussrag/query.hpp"

#include <algorithm>

namespace discussrag {

std::string_view dataset_kind_name(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::mmlu_med: return "mmlu_med";
    case DatasetKind::medqa_us: return "medqa_us";
    case DatasetKind::bioasq: return "bioasq";
    case DatasetKind::pubmedqa: return "pubmedqa";
    case DatasetKind::custom: return "custom";
  }
  return "custom";
}

DatasetKind dataset_kind_from_name(std::string_view name) {
  if (name == "mmlu_med") return DatasetKind::mmlu_med;
  if (name == "medqa_us") return DatasetKind::medqa_us;
  if (name == "bioasq") return DatasetKind::bioasq;
  if (name == "pubmedqa") return DatasetKind::pubmedqa;
  if (name == "custom") return DatasetKind::custom;
  throw ConfigError("unknown dataset kind: " + std::string(name));
}

std::vector<std::string> Query::labels() const {
  std::vector<std::string> out;
  out.reserve(options.size());
  for (const auto& [label, _] : options) out.push_back(label);
  return out;
}

bool Query::has_label(const std::string& label) const {
  return std::any_of(options.begin(), options.end(),
                     [&](const auto& option) { return option.first == label; });
}

}  // namespace discussrag
