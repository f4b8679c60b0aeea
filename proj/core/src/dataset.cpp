#include "discussrag/dataset.hpp"

#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "discussrag/hashing.hpp"

namespace discussrag {

namespace {

std::vector<std::pair<std::string, std::string>> fixed_labels(DatasetKind kind) {
  if (kind == DatasetKind::bioasq) return {{"yes", "yes"}, {"no", "no"}};
  return {{"yes", "yes"}, {"no", "no"}, {"maybe", "maybe"}};
}

Query parse_record(const nlohmann::json& record, DatasetKind kind, size_t line_no) {
  Query query;
  query.dataset = kind;
  query.stem = record.at("question").get<std::string>();
  if (trim(query.stem).empty()) throw std::runtime_error("empty question");

  query.query_id = record.value("id", "");
  if (query.query_id.empty())
    query.query_id = std::string(dataset_kind_name(kind)) + "-" + std::to_string(line_no);

  if (kind == DatasetKind::bioasq || kind == DatasetKind::pubmedqa) {
    query.options = fixed_labels(kind);
  } else {
    const auto& options = record.at("options");
    if (!options.is_object() || options.empty())
      throw std::runtime_error("options must be a non-empty object");
    for (const auto& [label, text] : options.items())
      query.options.emplace_back(label, text.get<std::string>());
  }

  query.gold = record.at("answer").get<std::string>();
  if (!query.has_label(query.gold))
    throw std::runtime_error("answer \"" + query.gold + "\" is not an option label");
  return query;
}

}  // namespace

std::vector<Query> load_dataset(const std::filesystem::path& path, DatasetKind kind) {
  std::ifstream in(path);
  if (!in) throw DatasetFormatError("cannot open dataset file: " + path.string());

  std::vector<Query> queries;
  std::vector<std::string> problems;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      Query query = parse_record(nlohmann::json::parse(line), kind, line_no);
      if (!seen_ids.insert(query.query_id).second)
        throw std::runtime_error("duplicate query id " + query.query_id);
      queries.push_back(std::move(query));
    } catch (const std::exception& ex) {
      problems.push_back("line " + std::to_string(line_no) + ": " + ex.what());
    }
  }

  if (!problems.empty()) {
    std::string message = "dataset " + path.string() + " has " +
                          std::to_string(problems.size()) + " malformed record(s): ";
    for (size_t i = 0; i < problems.size(); ++i) {
      if (i > 0) message += "; ";
      message += problems[i];
    }
    throw DatasetFormatError(message);
  }
  return queries;
}

}  // namespace discussrag
