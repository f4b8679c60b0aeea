#include "discussrag/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <sstream>
#include <thread>

namespace discussrag {

namespace {

std::string format_percent(double fraction, bool with_sign) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), with_sign ? "%+.2f%%" : "%.2f%%", fraction * 100.0);
  return buffer;
}

}  // namespace

RunReport evaluate(const std::vector<Query>& queries, const PipelineConfig& config,
                   const VectorIndex& index, LlmGateway& gateway,
                   const EvaluateOptions& options) {
  if (options.parallel < 1) throw ConfigError("parallelism must be at least 1");
  if (options.parallel > 1 && gateway.deterministic())
    throw ConfigError("scripted runs must be single-threaded; set parallelism to 1");

  RunReport report;
  report.dataset = queries.empty() ? "custom" : std::string(dataset_kind_name(queries[0].dataset));
  report.mode = std::string(pipeline_mode_name(config.mode));
  report.k = config.k;
  report.n_questions = queries.size();

  PromptLibrary prompts = config.template_dir.empty()
                              ? PromptLibrary::defaults()
                              : PromptLibrary::from_dir(config.template_dir);
  Pipeline pipeline(prompts, config);

  std::vector<PipelineResult> results(queries.size());
  if (options.parallel == 1) {
    for (size_t i = 0; i < queries.size(); ++i)
      results[i] = pipeline.answer_query(queries[i], index, gateway);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t i = next.fetch_add(1); i < queries.size(); i = next.fetch_add(1))
        results[i] = pipeline.answer_query(queries[i], index, gateway);
    };
    std::vector<std::thread> threads;
    const size_t count = std::min<size_t>(options.parallel, std::max<size_t>(queries.size(), 1));
    threads.reserve(count);
    for (size_t t = 0; t < count; ++t) threads.emplace_back(worker);
    for (std::thread& thread : threads) thread.join();
  }

  for (size_t i = 0; i < queries.size(); ++i) {
    const PipelineResult& result = results[i];
    if (options.on_trace) options.on_trace(result.trace);
    if (!result.trace.error.empty() || !result.answer) {
      report.failures.push_back(RunFailure{queries[i].query_id, result.trace.error});
      continue;
    }
    PerQuestion row;
    row.query_id = queries[i].query_id;
    row.predicted = result.answer->choice;
    row.gold = queries[i].gold;
    row.strategy = std::string(answer_strategy_name(result.answer->strategy));
    row.correct = !row.predicted.empty() && row.predicted == row.gold;
    if (row.correct) ++report.n_correct;
    report.per_question.push_back(std::move(row));
  }

  std::sort(report.per_question.begin(), report.per_question.end(),
            [](const PerQuestion& a, const PerQuestion& b) { return a.query_id < b.query_id; });
  std::sort(report.failures.begin(), report.failures.end(),
            [](const RunFailure& a, const RunFailure& b) { return a.query_id < b.query_id; });

  if (!report.per_question.empty())
    report.accuracy =
        static_cast<double>(report.n_correct) / static_cast<double>(report.per_question.size());
  return report;
}

std::vector<RunReport> evaluate_sweep(const std::vector<Query>& queries,
                                      const PipelineConfig& config, const VectorIndex& index,
                                      LlmGateway& gateway, const std::vector<size_t>& ks,
                                      const EvaluateOptions& options) {
  std::vector<RunReport> reports;
  reports.reserve(ks.size());
  for (size_t k : ks) {
    PipelineConfig swept = config;
    swept.k = k;
    reports.push_back(evaluate(queries, swept, index, gateway, options));
  }
  return reports;
}

nlohmann::json report_to_json(const RunReport& report) {
  nlohmann::json per_question = nlohmann::json::array();
  for (const PerQuestion& row : report.per_question)
    per_question.push_back({{"query_id", row.query_id},
                            {"predicted", row.predicted},
                            {"gold", row.gold},
                            {"strategy", row.strategy},
                            {"correct", row.correct}});

  nlohmann::json failures = nlohmann::json::array();
  for (const RunFailure& failure : report.failures)
    failures.push_back({{"query_id", failure.query_id}, {"error", failure.error}});

  nlohmann::json out = {
      {"dataset", report.dataset},
      {"mode", report.mode},
      {"k", report.k},
      {"n_questions", report.n_questions},
      {"n_correct", report.n_correct},
      {"per_question", std::move(per_question)},
      {"failures", std::move(failures)},
  };
  if (report.accuracy)
    out["accuracy"] = *report.accuracy;
  else
    out["accuracy"] = nullptr;
  return out;
}

std::string render_report_table(const std::vector<RunReport>& reports) {
  // Baseline accuracies keyed by dataset and k, for the delta column.
  auto baseline_for = [&](const RunReport& report) -> std::optional<double> {
    for (const RunReport& other : reports)
      if (other.mode == "baseline_rag" && other.dataset == report.dataset &&
          other.k == report.k && other.accuracy)
        return other.accuracy;
    return std::nullopt;
  };

  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %-14s %4s %10s %10s\n", "dataset", "mode", "k",
                "accuracy", "delta");
  out << line;
  for (const RunReport& report : reports) {
    std::string accuracy = report.accuracy ? format_percent(*report.accuracy, false) : "n/a";
    std::string delta = "-";
    if (report.mode != "baseline_rag" && report.accuracy) {
      if (auto base = baseline_for(report))
        delta = format_percent(*report.accuracy - *base, true);
    }
    std::snprintf(line, sizeof(line), "%-12s %-14s %4zu %10s %10s\n", report.dataset.c_str(),
                  report.mode.c_str(), report.k, accuracy.c_str(), delta.c_str());
    out << line;
  }
  return out.str();
}

}  // namespace discussrag
