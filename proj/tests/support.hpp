#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "discussrag/gateway.hpp"
#include "discussrag/query.hpp"
#include "discussrag/scripted_gateway.hpp"

namespace testsupport {

// Scratch directory under the system temp root, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("discussrag-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline discussrag::FixtureEntry reply(std::string content) {
  return {"*", std::move(content), discussrag::FinishReason::stop};
}

inline discussrag::FixtureEntry fault(std::string message = "") {
  return {"*", std::move(message), discussrag::FinishReason::error};
}

inline discussrag::ChatRequest make_request(const std::string& user,
                                            const std::string& system = "system prompt") {
  discussrag::ChatRequest request;
  request.model_id = "test-model";
  request.messages.push_back({discussrag::Role::system, system});
  request.messages.push_back({discussrag::Role::user, user});
  return request;
}

inline discussrag::Query make_query() {
  discussrag::Query query;
  query.query_id = "q1";
  query.stem = "Which of the following sites has venous blood with the lowest oxygen content?";
  query.options = {{"A", "Renal vein"},
                   {"B", "Coronary sinus"},
                   {"C", "Pulmonary vein"},
                   {"D", "Internal jugular vein"}};
  query.gold = "B";
  return query;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream content;
  content << in.rdbuf();
  return content.str();
}

}  // namespace testsupport
