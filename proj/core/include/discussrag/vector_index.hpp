#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "discussrag/corpus.hpp"
#include "discussrag/gateway.hpp"

namespace discussrag {

struct IndexEntry {
  std::string chunk_id;
  EmbeddingVector vector;
  float norm = 0.0f;
};

// Text and provenance for a chunk, kept alongside the vectors so retrieval
// can return snippets without the original corpus at hand.
struct ChunkInfo {
  std::string chunk_id;
  std::string doc_id;
  std::string title;
  std::string text;
};

struct IndexMetadata {
  std::string embedder_id;
  uint32_t chunk_size = 0;
  uint32_t overlap = 0;
  std::string corpus_fingerprint;
};

// Immutable after build; entries sorted by chunk_id. Retrieval is an exact
// linear scan, which is both fast enough at this corpus scale and free of
// approximation artifacts.
struct VectorIndex {
  uint32_t dim = 0;
  std::vector<IndexEntry> entries;
  std::vector<ChunkInfo> chunks;  // parallel to entries
  IndexMetadata metadata;
};

struct Snippet {
  std::string chunk_id;
  std::string doc_id;
  std::string text;
  std::string title;
  double score = 0.0;  // cosine similarity that ranked it
};

struct BuildOptions {
  size_t embed_batch = 64;
  uint32_t chunk_size = 1000;
  uint32_t overlap = 200;
  std::string corpus_fingerprint;
};

VectorIndex build_index(const std::vector<Chunk>& chunks, LlmGateway& embedder,
                        const BuildOptions& options = {});

// The min(k, entries) most cosine-similar chunks, sorted by descending
// score with ties broken by ascending chunk_id. A zero-norm query or entry
// scores 0.
std::vector<Snippet> retrieve_top_k(const VectorIndex& index, const EmbeddingVector& query_vec,
                                    size_t k);

double cosine_similarity(const std::vector<float>& a, const std::vector<float>& b);

}  // namespace discussrag
