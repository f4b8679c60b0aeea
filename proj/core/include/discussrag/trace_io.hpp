#pragma once

#include <filesystem>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "discussrag/pipeline.hpp"

namespace discussrag {

// Schema "trace_v1": one JSON object per query. Optional stages are
// omitted entirely when absent, so a baseline trace has no transcript,
// distilled, or verdict keys. Keys serialize in sorted order, making the
// output deterministic.
nlohmann::json trace_to_json(const PipelineTrace& trace);

// Appends one JSON line per trace to a run-trace file.
class TraceWriter {
 public:
  explicit TraceWriter(const std::filesystem::path& path);

  void write(const PipelineTrace& trace);

 private:
  std::ofstream out_;
};

std::vector<nlohmann::json> load_trace_file(const std::filesystem::path& path);

}  // namespace discussrag
