#include "discussrag/vector_index.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace discussrag {

namespace {

double norm_of(const std::vector<float>& values) {
  double sum = 0.0;
  for (float v : values) sum += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(sum);
}

}  // namespace

double cosine_similarity(const std::vector<float>& a, const std::vector<float>& b) {
  double dot = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  const double na = norm_of(a);
  const double nb = norm_of(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (na * nb);
}

VectorIndex build_index(const std::vector<Chunk>& chunks, LlmGateway& embedder,
                        const BuildOptions& options) {
  if (chunks.empty()) throw EmptyCorpus("cannot build an index from zero chunks");

  std::unordered_set<std::string> seen;
  for (const Chunk& chunk : chunks) {
    if (!seen.insert(chunk.chunk_id).second)
      throw DuplicateChunkId("duplicate chunk_id " + chunk.chunk_id);
  }

  VectorIndex index;
  index.metadata.embedder_id = embedder.embedder_id();
  index.metadata.chunk_size = options.chunk_size;
  index.metadata.overlap = options.overlap;
  index.metadata.corpus_fingerprint = options.corpus_fingerprint;

  const size_t batch = options.embed_batch == 0 ? 64 : options.embed_batch;
  for (size_t begin = 0; begin < chunks.size(); begin += batch) {
    const size_t end = std::min(begin + batch, chunks.size());
    std::vector<std::string> texts;
    texts.reserve(end - begin);
    for (size_t i = begin; i < end; ++i) texts.push_back(chunks[i].text);

    std::vector<EmbeddingVector> vectors = embedder.embed(texts);
    if (vectors.size() != texts.size())
      throw DimensionMismatch("embedder returned " + std::to_string(vectors.size()) +
                              " vectors for " + std::to_string(texts.size()) + " texts");

    for (size_t i = begin; i < end; ++i) {
      EmbeddingVector vec = std::move(vectors[i - begin]);
      if (index.dim == 0) index.dim = static_cast<uint32_t>(vec.dim());
      if (vec.dim() != index.dim || vec.dim() == 0)
        throw DimensionMismatch("chunk " + chunks[i].chunk_id + " embedded to dim " +
                                std::to_string(vec.dim()) + ", expected " +
                                std::to_string(index.dim));
      IndexEntry entry;
      entry.chunk_id = chunks[i].chunk_id;
      entry.norm = static_cast<float>(norm_of(vec.values));
      entry.vector = std::move(vec);
      index.entries.push_back(std::move(entry));
      index.chunks.push_back(
          ChunkInfo{chunks[i].chunk_id, chunks[i].doc_id, chunks[i].title, chunks[i].text});
    }
  }

  // Seal with a canonical order so the index is independent of batch layout.
  std::vector<size_t> order(index.entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return index.entries[a].chunk_id < index.entries[b].chunk_id;
  });
  VectorIndex sealed;
  sealed.dim = index.dim;
  sealed.metadata = index.metadata;
  sealed.entries.reserve(order.size());
  sealed.chunks.reserve(order.size());
  for (size_t i : order) {
    sealed.entries.push_back(std::move(index.entries[i]));
    sealed.chunks.push_back(std::move(index.chunks[i]));
  }
  return sealed;
}

std::vector<Snippet> retrieve_top_k(const VectorIndex& index, const EmbeddingVector& query_vec,
                                    size_t k) {
  if (query_vec.dim() != index.dim)
    throw DimensionMismatch("query dim " + std::to_string(query_vec.dim()) +
                            " does not match index dim " + std::to_string(index.dim));

  struct Scored {
    double score;
    size_t entry;
  };

  const double query_norm = norm_of(query_vec.values);
  std::vector<Scored> scored;
  scored.reserve(index.entries.size());
  for (size_t i = 0; i < index.entries.size(); ++i) {
    const IndexEntry& entry = index.entries[i];
    double score = 0.0;
    if (query_norm != 0.0) {
      double dot = 0.0;
      for (size_t d = 0; d < entry.vector.values.size(); ++d)
        dot += static_cast<double>(query_vec.values[d]) *
               static_cast<double>(entry.vector.values[d]);
      const double entry_norm = norm_of(entry.vector.values);
      if (entry_norm != 0.0) score = dot / (query_norm * entry_norm);
    }
    scored.push_back(Scored{score, i});
  }

  const size_t take = std::min(k, scored.size());
  std::vector<Scored> top(take);
  std::partial_sort_copy(scored.begin(), scored.end(), top.begin(), top.end(),
                         [&](const Scored& a, const Scored& b) {
                           if (a.score != b.score) return a.score > b.score;
                           return index.entries[a.entry].chunk_id <
                                  index.entries[b.entry].chunk_id;
                         });

  std::vector<Snippet> snippets;
  snippets.reserve(take);
  for (const Scored& s : top) {
    const ChunkInfo& info = index.chunks[s.entry];
    snippets.push_back(Snippet{info.chunk_id, info.doc_id, info.text, info.title, s.score});
  }
  return snippets;
}

}  // namespace discussrag
