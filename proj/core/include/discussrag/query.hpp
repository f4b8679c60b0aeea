#pragma once

#include <string>
#include <utility>
#include <vector>

#include "discussrag/errors.hpp"

namespace discussrag {

enum class DatasetKind { mmlu_med, medqa_us, bioasq, pubmedqa, custom };

std::string_view dataset_kind_name(DatasetKind kind);
DatasetKind dataset_kind_from_name(std::string_view name);

struct Query {
  std::string query_id;
  std::string stem;
  // Ordered label -> option text. Yes/no style datasets use the fixed label
  // sets {yes, no} or {yes, no, maybe}.
  std::vector<std::pair<std::string, std::string>> options;
  std::string gold;  // empty for ad-hoc questions without a reference answer
  DatasetKind dataset = DatasetKind::custom;

  std::vector<std::string> labels() const;
  bool has_label(const std::string& label) const;
};

}  // namespace discussrag
