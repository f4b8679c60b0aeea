#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "discussrag/errors.hpp"

namespace discussrag {

struct Document {
  std::string doc_id;
  std::string title;
  std::string body;
};

struct Chunk {
  std::string chunk_id;  // doc_id + "#" + zero-padded ordinal
  std::string doc_id;
  std::string title;
  std::string text;
  size_t span_start = 0;  // offsets into the document body, [start, end)
  size_t span_end = 0;
};

struct ChunkOptions {
  size_t chunk_size = 1000;
  size_t overlap = 200;
  // Chunk ends are shifted left to the nearest whitespace within this many
  // characters so words stay intact. 0 disables the adjustment.
  size_t whitespace_window = 50;
};

// Fixed-stride sliding window: each chunk starts `overlap` characters
// before the previous one ended, so consecutive chunks share exactly that
// much text and the spans cover the whole body.
std::vector<Chunk> chunk_document(const Document& doc, const ChunkOptions& options);

std::vector<Chunk> chunk_corpus(const std::vector<Document>& docs, const ChunkOptions& options);

// One JSON object per line with fields doc_id, title, body.
std::vector<Document> load_corpus_jsonl(const std::filesystem::path& path);

// Stable hash of every document's id, title, and body. Recorded in index
// metadata so a stale index is detectable against a changed corpus.
std::string corpus_fingerprint(const std::vector<Document>& docs);

}  // namespace discussrag
