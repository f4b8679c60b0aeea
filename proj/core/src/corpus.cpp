#include "discussrag/corpus.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "discussrag/hashing.hpp"

namespace discussrag {

namespace {

std::string make_chunk_id(const std::string& doc_id, size_t ordinal) {
  char suffix[16];
  std::snprintf(suffix, sizeof(suffix), "#%06zu", ordinal);
  return doc_id + suffix;
}

}  // namespace

std::vector<Chunk> chunk_document(const Document& doc, const ChunkOptions& options) {
  if (options.chunk_size == 0) throw InvalidChunking("chunk_size must be positive");
  if (options.overlap >= options.chunk_size)
    throw InvalidChunking("overlap " + std::to_string(options.overlap) +
                          " must be smaller than chunk_size " +
                          std::to_string(options.chunk_size));
  if (doc.body.empty()) throw InvalidChunking("document " + doc.doc_id + " has empty body");

  const std::string& body = doc.body;
  std::vector<Chunk> chunks;
  size_t start = 0;
  size_t ordinal = 0;
  while (true) {
    size_t end = std::min(start + options.chunk_size, body.size());
    if (end < body.size() && options.whitespace_window > 0) {
      // Cut at a whitespace character shortly before the raw end, but never
      // so far back that the next chunk would fail to advance.
      size_t lower = start + options.overlap + 1;
      if (end > options.whitespace_window && end - options.whitespace_window > lower)
        lower = end - options.whitespace_window;
      for (size_t p = end; p-- > lower;) {
        if (std::isspace(static_cast<unsigned char>(body[p]))) {
          end = p;
          break;
        }
      }
    }

    Chunk chunk;
    chunk.chunk_id = make_chunk_id(doc.doc_id, ordinal++);
    chunk.doc_id = doc.doc_id;
    chunk.title = doc.title;
    chunk.text = body.substr(start, end - start);
    chunk.span_start = start;
    chunk.span_end = end;
    chunks.push_back(std::move(chunk));

    if (end >= body.size()) break;
    start = end - options.overlap;
  }
  return chunks;
}

std::vector<Chunk> chunk_corpus(const std::vector<Document>& docs, const ChunkOptions& options) {
  std::vector<Chunk> chunks;
  for (const Document& doc : docs) {
    std::vector<Chunk> doc_chunks = chunk_document(doc, options);
    chunks.insert(chunks.end(), std::make_move_iterator(doc_chunks.begin()),
                  std::make_move_iterator(doc_chunks.end()));
  }
  return chunks;
}

std::vector<Document> load_corpus_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open corpus file: " + path.string());

  std::vector<Document> docs;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError("corpus " + path.string() + " line " + std::to_string(line_no) +
                        ": " + ex.what());
    }
    Document doc;
    try {
      doc.doc_id = record.at("doc_id").get<std::string>();
      doc.title = record.value("title", "");
      doc.body = record.at("body").get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError("corpus " + path.string() + " line " + std::to_string(line_no) +
                        ": " + ex.what());
    }
    if (doc.doc_id.empty() || doc.body.empty())
      throw FormatError("corpus " + path.string() + " line " + std::to_string(line_no) +
                        ": doc_id and body must be non-empty");
    if (!seen_ids.insert(doc.doc_id).second)
      throw FormatError("corpus " + path.string() + " line " + std::to_string(line_no) +
                        ": duplicate doc_id " + doc.doc_id);
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::string corpus_fingerprint(const std::vector<Document>& docs) {
  uint64_t state = kFnvOffset;
  for (const Document& doc : docs) {
    state = fnv1a64(doc.doc_id, state);
    state = fnv1a64_byte(0x1f, state);
    state = fnv1a64(doc.title, state);
    state = fnv1a64_byte(0x1f, state);
    state = fnv1a64(doc.body, state);
    state = fnv1a64_byte(0x1e, state);
  }
  return to_hex16(state);
}

}  // namespace discussrag
