#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "discussrag/pipeline.hpp"
#include "discussrag/query.hpp"

namespace discussrag {

struct PerQuestion {
  std::string query_id;
  std::string predicted;  // empty when the generation was unparseable
  std::string gold;
  std::string strategy;
  bool correct = false;
};

struct RunFailure {
  std::string query_id;
  std::string error;
};

// Failed queries (infrastructure errors) are excluded from the accuracy
// denominator; unparseable answers stay in it and score as incorrect.
// accuracy is empty when nothing scorable remains.
struct RunReport {
  std::string dataset;
  std::string mode;
  size_t k = 0;
  size_t n_questions = 0;
  size_t n_correct = 0;
  std::optional<double> accuracy;
  std::vector<PerQuestion> per_question;  // sorted by query_id
  std::vector<RunFailure> failures;       // sorted by query_id
};

struct EvaluateOptions {
  int parallel = 1;
  // Called once per query in query order after the run completes.
  std::function<void(const PipelineTrace&)> on_trace;
};

RunReport evaluate(const std::vector<Query>& queries, const PipelineConfig& config,
                   const VectorIndex& index, LlmGateway& gateway,
                   const EvaluateOptions& options = {});

// One report per k, in the given order.
std::vector<RunReport> evaluate_sweep(const std::vector<Query>& queries,
                                      const PipelineConfig& config, const VectorIndex& index,
                                      LlmGateway& gateway, const std::vector<size_t>& ks,
                                      const EvaluateOptions& options = {});

nlohmann::json report_to_json(const RunReport& report);

// Plain-text comparison table: dataset | mode | k | accuracy | delta, where
// delta is against the baseline row with the same dataset and k.
std::string render_report_table(const std::vector<RunReport>& reports);

}  // namespace discussrag
