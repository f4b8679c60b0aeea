#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "discussrag/bench.hpp"
#include "discussrag/corpus.hpp"
#include "discussrag/dataset.hpp"
#include "discussrag/hashing.hpp"
#include "discussrag/http_gateway.hpp"
#include "discussrag/index_io.hpp"
#include "discussrag/manifest.hpp"
#include "discussrag/pipeline.hpp"
#include "discussrag/scripted_gateway.hpp"
#include "discussrag/trace_io.hpp"

namespace {

using namespace discussrag;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;  // the run worked but the outcome is a failure
constexpr int kExitUsage = 2;   // bad flags, bad config, unreadable inputs

struct Settings {
  std::string mode = "discuss_rag";
  size_t k = 5;
  int n_experts = 3;
  int m_rounds = 3;
  std::string model = "gpt-3.5-turbo-0125";
  std::string base_url = "https://api.openai.com/v1";
  std::string template_dir;
  std::string index_path;
  std::string dataset;
  std::string dataset_kind = "custom";
  std::string k_sweep;
  int parallel = 1;
  std::string scripted_fixture;
  std::string out_dir = "runs";
  std::string api_key;  // environment only, never echoed
};

// One subcommand's view of the shared flags, so presence can be checked
// per option when resolving precedence (flags > config file > env >
// defaults).
struct SharedFlags {
  Settings values;
  std::string config_path;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App& cmd) {
    options["mode"] = cmd.add_option("--mode", values.mode,
                                     "discuss_rag | baseline_rag (bench also takes: both)");
    options["k"] = cmd.add_option("--k", values.k, "snippets to retrieve");
    options["n_experts"] = cmd.add_option("--n-experts", values.n_experts, "experts per panel");
    options["m_rounds"] = cmd.add_option("--m-rounds", values.m_rounds,
                                         "maximum discussion rounds");
    options["model"] = cmd.add_option("--model", values.model, "chat model id");
    options["base_url"] = cmd.add_option("--base-url", values.base_url,
                                         "OpenAI-compatible API base URL");
    options["template_dir"] = cmd.add_option("--template-dir", values.template_dir,
                                             "prompt template overrides");
    options["index"] = cmd.add_option("--index", values.index_path, "index file");
    options["dataset"] = cmd.add_option("--dataset", values.dataset, "dataset file (JSONL)");
    options["dataset_kind"] =
        cmd.add_option("--dataset-kind", values.dataset_kind,
                       "mmlu_med | medqa_us | bioasq | pubmedqa | custom");
    options["k_sweep"] = cmd.add_option("--k-sweep", values.k_sweep,
                                        "comma-separated k values, one report each");
    options["parallel"] = cmd.add_option("--parallel", values.parallel,
                                         "worker threads for bench (live backend only)");
    options["scripted_fixture"] =
        cmd.add_option("--scripted-fixture", values.scripted_fixture,
                       "fixture file; selects the deterministic scripted backend");
    options["out_dir"] = cmd.add_option("--out-dir", values.out_dir, "run output directory");
    cmd.add_option("--config", config_path, "JSON config file (lower precedence than flags)");
  }

  Settings resolve() const {
    Settings settings;  // defaults

    if (const char* key = std::getenv("DISCUSS_RAG_API_KEY")) settings.api_key = key;

    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config file: " + config_path);
      nlohmann::json config;
      try {
        config = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("config file " + config_path + ": " + ex.what());
      }
      settings.mode = config.value("mode", settings.mode);
      settings.k = config.value("k", settings.k);
      settings.n_experts = config.value("n_experts", settings.n_experts);
      settings.m_rounds = config.value("m_rounds", settings.m_rounds);
      settings.model = config.value("model", settings.model);
      settings.base_url = config.value("base_url", settings.base_url);
      settings.template_dir = config.value("template_dir", settings.template_dir);
      settings.index_path = config.value("index", settings.index_path);
      settings.dataset = config.value("dataset", settings.dataset);
      settings.dataset_kind = config.value("dataset_kind", settings.dataset_kind);
      settings.k_sweep = config.value("k_sweep", settings.k_sweep);
      settings.parallel = config.value("parallel", settings.parallel);
      settings.scripted_fixture = config.value("scripted_fixture", settings.scripted_fixture);
      settings.out_dir = config.value("out_dir", settings.out_dir);
    }

    auto given = [&](const char* name) {
      auto it = options.find(name);
      return it != options.end() && it->second->count() > 0;
    };
    if (given("mode")) settings.mode = values.mode;
    if (given("k")) settings.k = values.k;
    if (given("n_experts")) settings.n_experts = values.n_experts;
    if (given("m_rounds")) settings.m_rounds = values.m_rounds;
    if (given("model")) settings.model = values.model;
    if (given("base_url")) settings.base_url = values.base_url;
    if (given("template_dir")) settings.template_dir = values.template_dir;
    if (given("index")) settings.index_path = values.index_path;
    if (given("dataset")) settings.dataset = values.dataset;
    if (given("dataset_kind")) settings.dataset_kind = values.dataset_kind;
    if (given("k_sweep")) settings.k_sweep = values.k_sweep;
    if (given("parallel")) settings.parallel = values.parallel;
    if (given("scripted_fixture")) settings.scripted_fixture = values.scripted_fixture;
    if (given("out_dir")) settings.out_dir = values.out_dir;
    return settings;
  }
};

nlohmann::json settings_to_json(const Settings& settings) {
  return {
      {"mode", settings.mode},
      {"k", settings.k},
      {"n_experts", settings.n_experts},
      {"m_rounds", settings.m_rounds},
      {"model", settings.model},
      {"base_url", settings.base_url},
      {"template_dir", settings.template_dir},
      {"index", settings.index_path},
      {"dataset", settings.dataset},
      {"dataset_kind", settings.dataset_kind},
      {"k_sweep", settings.k_sweep},
      {"parallel", settings.parallel},
      {"scripted_fixture", settings.scripted_fixture},
      {"out_dir", settings.out_dir},
  };
}

std::unique_ptr<LlmGateway> make_gateway(const Settings& settings, bool needs_chat) {
  if (!settings.scripted_fixture.empty())
    return std::make_unique<ScriptedGateway>(load_fixture_file(settings.scripted_fixture));
  if (!settings.api_key.empty()) {
    HttpGatewayOptions options;
    options.base_url = settings.base_url;
    options.api_key = settings.api_key;
    return std::make_unique<HttpGateway>(std::move(options));
  }
  if (needs_chat)
    throw ConfigError(
        "no backend available: set DISCUSS_RAG_API_KEY or pass --scripted-fixture");
  // Embedding-only work runs on the built-in deterministic hash embedder.
  return std::make_unique<ScriptedGateway>(std::vector<FixtureEntry>{});
}

PromptLibrary load_prompts(const Settings& settings) {
  return settings.template_dir.empty() ? PromptLibrary::defaults()
                                       : PromptLibrary::from_dir(settings.template_dir);
}

PipelineConfig pipeline_config(const Settings& settings, const std::string& mode) {
  PipelineConfig config;
  config.mode = pipeline_mode_from_name(mode);
  config.k = settings.k;
  config.discussion.n_experts = settings.n_experts;
  config.discussion.max_rounds = settings.m_rounds;
  config.model_id = settings.model;
  config.template_dir = settings.template_dir;
  config.index_path = settings.index_path;
  return config;
}

std::vector<size_t> parse_k_list(const Settings& settings) {
  if (settings.k_sweep.empty()) return {settings.k};
  std::vector<size_t> ks;
  std::stringstream stream(settings.k_sweep);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      ks.push_back(std::stoul(item));
    } catch (const std::exception&) {
      throw ConfigError("bad --k-sweep value: " + item);
    }
  }
  if (ks.empty()) throw ConfigError("--k-sweep lists no k values");
  return ks;
}

void write_run_manifest(const Settings& settings, const VectorIndex* index,
                        const PromptLibrary& prompts, const LlmGateway& gateway) {
  RunManifest manifest;
  manifest.config = settings_to_json(settings);
  manifest.corpus_fingerprint = index ? index->metadata.corpus_fingerprint : "";
  manifest.template_fingerprint = prompts.fingerprint();
  manifest.backend_id = gateway.backend_id();
  manifest.embedder_id = gateway.embedder_id();
  manifest.timestamp = utc_timestamp_now();
  write_manifest(std::filesystem::path(settings.out_dir) / "manifest.json", manifest);
}

std::string truncate(const std::string& text, size_t limit) {
  if (text.size() <= limit) return text;
  return text.substr(0, limit) + "...";
}

// --- index ---

int cmd_index(const Settings& settings, const std::string& corpus_path,
              const std::string& out_path, size_t chunk_size, size_t overlap) {
  std::vector<Document> docs = load_corpus_jsonl(corpus_path);
  if (docs.empty()) throw ConfigError("corpus has no documents: " + corpus_path);

  ChunkOptions chunking;
  chunking.chunk_size = chunk_size;
  chunking.overlap = overlap;
  std::vector<Chunk> chunks = chunk_corpus(docs, chunking);

  std::unique_ptr<LlmGateway> gateway = make_gateway(settings, false);
  BuildOptions build;
  build.chunk_size = static_cast<uint32_t>(chunk_size);
  build.overlap = static_cast<uint32_t>(overlap);
  build.corpus_fingerprint = corpus_fingerprint(docs);
  VectorIndex index = build_index(chunks, *gateway, build);
  save_index(index, out_path);

  std::cout << "documents: " << docs.size() << "\n"
            << "chunks: " << chunks.size() << "\n"
            << "dim: " << index.dim << "\n"
            << "embedder: " << index.metadata.embedder_id << "\n"
            << "index: " << out_path << "\n";
  return kExitOk;
}

// --- ask ---

Query build_ask_query(const Settings& settings, const std::string& question,
                      const std::vector<std::string>& option_flags) {
  Query query;
  query.query_id = "ask";
  query.stem = question;
  query.dataset = dataset_kind_from_name(settings.dataset_kind);

  if (query.dataset == DatasetKind::bioasq) {
    query.options = {{"yes", "yes"}, {"no", "no"}};
  } else if (query.dataset == DatasetKind::pubmedqa) {
    query.options = {{"yes", "yes"}, {"no", "no"}, {"maybe", "maybe"}};
  } else {
    for (const std::string& flag : option_flags) {
      const size_t eq = flag.find('=');
      if (eq == std::string::npos || eq == 0)
        throw ConfigError("--option must look like LABEL=text, got: " + flag);
      query.options.emplace_back(trim(flag.substr(0, eq)), trim(flag.substr(eq + 1)));
    }
    if (query.options.size() < 2)
      throw ConfigError("pass at least two --option LABEL=text choices "
                        "(or a yes/no --dataset-kind)");
  }
  return query;
}

int cmd_ask(const Settings& settings, const std::string& question,
            const std::vector<std::string>& option_flags) {
  if (settings.index_path.empty()) throw ConfigError("--index is required");
  if (settings.mode != "discuss_rag" && settings.mode != "baseline_rag")
    throw ConfigError("--mode must be discuss_rag or baseline_rag, got: " + settings.mode);

  Query query = build_ask_query(settings, question, option_flags);
  VectorIndex index = load_index(settings.index_path);
  PromptLibrary prompts = load_prompts(settings);
  std::unique_ptr<LlmGateway> gateway = make_gateway(settings, true);

  Pipeline pipeline(prompts, pipeline_config(settings, settings.mode));
  PipelineResult result = pipeline.answer_query(query, index, *gateway);

  std::filesystem::create_directories(settings.out_dir);
  TraceWriter writer(std::filesystem::path(settings.out_dir) / "trace_ask.jsonl");
  writer.write(result.trace);
  write_run_manifest(settings, &index, prompts, *gateway);

  if (!result.trace.error.empty()) {
    std::cerr << "error: " << result.trace.error << "\n";
    return kExitDomain;
  }

  const Answer& answer = *result.answer;
  std::cout << "answer: " << (answer.choice.empty() ? "(unparseable)" : answer.choice) << "\n"
            << "strategy: " << answer_strategy_name(answer.strategy) << "\n";
  if (result.trace.distilled && !result.trace.distilled->content.empty())
    std::cout << "distilled: " << truncate(result.trace.distilled->content, 300) << "\n";
  std::cout << "snippets:";
  if (!result.trace.snippets || result.trace.snippets->empty()) {
    std::cout << " (none)\n";
  } else {
    std::cout << "\n";
    char line[64];
    for (size_t i = 0; i < result.trace.snippets->size(); ++i) {
      const Snippet& snippet = (*result.trace.snippets)[i];
      std::snprintf(line, sizeof(line), "  [%zu] %-24s score %.4f", i + 1,
                    snippet.chunk_id.c_str(), snippet.score);
      std::cout << line << "\n";
    }
  }
  std::cout << "trace: " << (std::filesystem::path(settings.out_dir) / "trace_ask.jsonl").string()
            << "\n";
  return answer.choice.empty() ? kExitDomain : kExitOk;
}

// --- bench ---

int cmd_bench(const Settings& settings) {
  if (settings.dataset.empty()) throw ConfigError("--dataset is required");
  if (settings.index_path.empty()) throw ConfigError("--index is required");

  std::vector<Query> queries =
      load_dataset(settings.dataset, dataset_kind_from_name(settings.dataset_kind));
  if (queries.empty()) throw ConfigError("dataset is empty: " + settings.dataset);

  std::vector<std::string> modes;
  if (settings.mode == "both") {
    modes = {"baseline_rag", "discuss_rag"};  // baseline first, fixtures rely on this
  } else if (settings.mode == "baseline_rag" || settings.mode == "discuss_rag") {
    modes = {settings.mode};
  } else {
    throw ConfigError("--mode must be discuss_rag, baseline_rag, or both, got: " +
                      settings.mode);
  }

  VectorIndex index = load_index(settings.index_path);
  PromptLibrary prompts = load_prompts(settings);
  std::unique_ptr<LlmGateway> gateway = make_gateway(settings, true);
  std::vector<size_t> ks = parse_k_list(settings);

  std::filesystem::create_directories(settings.out_dir);
  std::vector<RunReport> reports;
  for (size_t k : ks) {
    for (const std::string& mode : modes) {
      PipelineConfig config = pipeline_config(settings, mode);
      config.k = k;

      std::ostringstream trace_name;
      trace_name << "trace_" << mode << "_k" << k << ".jsonl";
      TraceWriter writer(std::filesystem::path(settings.out_dir) / trace_name.str());
      EvaluateOptions options;
      options.parallel = settings.parallel;
      options.on_trace = [&writer](const PipelineTrace& trace) { writer.write(trace); };

      reports.push_back(evaluate(queries, config, index, *gateway, options));
    }
  }

  nlohmann::json report_file = nlohmann::json::array();
  for (const RunReport& report : reports) report_file.push_back(report_to_json(report));
  std::ofstream out(std::filesystem::path(settings.out_dir) / "reports.json");
  out << report_file.dump(2) << "\n";
  write_run_manifest(settings, &index, prompts, *gateway);

  std::cout << render_report_table(reports);
  std::cout << "reports: " << (std::filesystem::path(settings.out_dir) / "reports.json").string()
            << "\n";
  return kExitOk;
}

// --- trace ---

int cmd_trace(const std::string& trace_path, const std::string& query_id) {
  std::vector<nlohmann::json> traces = load_trace_file(trace_path);
  const nlohmann::json* found = nullptr;
  for (const nlohmann::json& trace : traces)
    if (trace.value("query_id", "") == query_id) found = &trace;
  if (found == nullptr) {
    std::cerr << "no trace for query id: " << query_id << "\n";
    return kExitDomain;
  }
  const nlohmann::json& trace = *found;

  std::cout << "query: " << query_id << "  mode: " << trace.value("mode", "?") << "\n";

  if (trace.contains("transcript")) {
    const auto& transcript = trace["transcript"];
    std::cout << "roster:\n";
    for (const auto& profile : transcript.value("roster", nlohmann::json::array()))
      std::cout << "  - " << profile.value("role_name", "?") << " ("
                << profile.value("specialty", "?") << ")\n";

    const auto insights = transcript.value("insights", nlohmann::json::array());
    const auto summaries = transcript.value("summaries", nlohmann::json::array());
    int max_round = 0;
    for (const auto& insight : insights) max_round = std::max(max_round, insight.value("round", 0));
    std::cout << "rounds attempted: " << max_round
              << ", summarized: " << (summaries.empty() ? 0 : summaries.size() - 1) << "\n";
    for (int round = 1; round <= max_round; ++round) {
      std::cout << "round " << round << ":\n";
      for (const auto& insight : insights) {
        if (insight.value("round", 0) != round) continue;
        if (insight.value("declined", false))
          std::cout << "  [" << insight.value("author", "?") << "] declined\n";
        else
          std::cout << "  [" << insight.value("author", "?") << "] "
                    << truncate(insight.value("content", ""), 160) << "\n";
      }
      for (const auto& summary : summaries)
        if (summary.value("round", -1) == round)
          std::cout << "  summary " << round << ": " << truncate(summary.value("content", ""), 160)
                    << "\n";
    }
    std::cout << "termination: " << transcript.value("termination_reason", "?") << "\n";
  }

  if (trace.contains("distilled"))
    std::cout << "distilled: " << truncate(trace["distilled"].value("content", ""), 240) << "\n";
  std::cout << "retrieval text: " << truncate(trace.value("retrieval_query_text", ""), 160)
            << "\n";

  const auto snippets = trace.value("snippets", nlohmann::json::array());
  std::cout << "snippets (" << snippets.size() << "):\n";
  for (size_t i = 0; i < snippets.size(); ++i)
    std::cout << "  [" << i + 1 << "] " << snippets[i].value("chunk_id", "?")
              << "  score=" << snippets[i].value("score", 0.0) << "\n";

  if (trace.contains("verdict"))
    std::cout << "verdict: " << (trace["verdict"].value("accepted", false) ? "accepted" : "rejected")
              << " (" << trace["verdict"].value("rationale", "") << ")\n";

  if (trace.contains("answer"))
    std::cout << "answer: " << trace["answer"].value("choice", "") << " ("
              << trace["answer"].value("strategy", "?") << ")\n";
  if (trace.contains("error")) std::cout << "error: " << trace.value("error", "") << "\n";
  std::cout << "gateway calls: " << trace.value("gateway_call_count", 0) << "\n";
  return kExitOk;
}

// --- templates ---

int cmd_templates(const std::string& out_dir) {
  PromptLibrary prompts = PromptLibrary::defaults();
  std::filesystem::create_directories(out_dir);
  for (const std::string& name : prompts.names()) {
    std::ofstream out(std::filesystem::path(out_dir) / (name + ".txt"));
    out << prompts.text(name);
  }
  std::cout << "wrote " << prompts.names().size() << " templates to " << out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-assisted retrieval pipeline: index corpora, answer questions, "
               "run QA benchmarks, inspect traces"};
  app.require_subcommand(1);

  // index
  CLI::App* index_cmd = app.add_subcommand("index", "chunk and embed a corpus into an index");
  std::string corpus_path;
  std::string out_path;
  size_t chunk_size = 1000;
  size_t overlap = 200;
  index_cmd->add_option("--corpus", corpus_path, "corpus JSONL (doc_id, title, body)")
      ->required();
  index_cmd->add_option("--out", out_path, "index file to write")->required();
  index_cmd->add_option("--chunk-size", chunk_size, "chunk size in characters");
  index_cmd->add_option("--overlap", overlap, "chunk overlap in characters");
  SharedFlags index_flags;
  index_flags.attach(*index_cmd);

  // ask
  CLI::App* ask_cmd = app.add_subcommand("ask", "answer a single question");
  std::string question;
  std::vector<std::string> option_flags;
  ask_cmd->add_option("question", question, "question text")->required();
  ask_cmd->add_option("--option", option_flags, "answer option, LABEL=text (repeatable)");
  SharedFlags ask_flags;
  ask_flags.attach(*ask_cmd);

  // bench
  CLI::App* bench_cmd = app.add_subcommand("bench", "evaluate a dataset, optionally comparing "
                                                    "both modes and sweeping k");
  SharedFlags bench_flags;
  bench_flags.attach(*bench_cmd);

  // trace
  CLI::App* trace_cmd = app.add_subcommand("trace", "pretty-print one query's trace");
  std::string trace_path;
  std::string trace_query_id;
  trace_cmd->add_option("trace_file", trace_path, "trace JSONL file")->required();
  trace_cmd->add_option("query_id", trace_query_id, "query id to show")->required();

  // templates
  CLI::App* templates_cmd =
      app.add_subcommand("templates", "write the built-in prompt templates to a directory");
  std::string templates_out = "templates";
  templates_cmd->add_option("--out-dir", templates_out, "directory to fill");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (index_cmd->parsed())
      return cmd_index(index_flags.resolve(), corpus_path, out_path, chunk_size, overlap);
    if (ask_cmd->parsed()) return cmd_ask(ask_flags.resolve(), question, option_flags);
    if (bench_cmd->parsed()) return cmd_bench(bench_flags.resolve());
    if (trace_cmd->parsed()) return cmd_trace(trace_path, trace_query_id);
    if (templates_cmd->parsed()) return cmd_templates(templates_out);
  } catch (const ConfigError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const DatasetFormatError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const InvalidChunking& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
