#include <doctest.h>
#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "discussrag/corpus.hpp"
#include "discussrag/index_io.hpp"
#include "discussrag/scripted_gateway.hpp"
#include "discussrag/vector_index.hpp"
#include "support.hpp"

using namespace discussrag;

namespace {

std::string random_body(std::mt19937_64& rng, size_t length) {
  static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz    ";
  std::uniform_int_distribution<size_t> pick(0, sizeof(alphabet) - 2);
  std::string body;
  body.reserve(length);
  for (size_t i = 0; i < length; ++i) body.push_back(alphabet[pick(rng)]);
  return body;
}

std::vector<Chunk> word_chunks(const std::vector<std::string>& texts) {
  std::vector<Chunk> chunks;
  for (size_t i = 0; i < texts.size(); ++i) {
    Chunk chunk;
    char id[32];
    std::snprintf(id, sizeof(id), "doc#%06zu", i);
    chunk.chunk_id = id;
    chunk.doc_id = "doc";
    chunk.text = texts[i];
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

}  // namespace

TEST_CASE("fixed-stride chunking walks the body with the configured overlap") {
  Document doc{"doc1", "title", std::string(1000, 'a')};
  ChunkOptions options{400, 100, 50};

  const auto chunks = chunk_document(doc, options);
  REQUIRE(chunks.size() == 3);
  CHECK(chunks[0].span_start == 0);
  CHECK(chunks[0].span_end == 400);
  CHECK(chunks[1].span_start == 300);
  CHECK(chunks[1].span_end == 700);
  CHECK(chunks[2].span_start == 600);
  CHECK(chunks[2].span_end == 1000);
  CHECK(chunks[0].chunk_id == "doc1#000000");
  CHECK(chunks[1].chunk_id == "doc1#000001");
  CHECK(chunks[2].chunk_id == "doc1#000002");
  for (const Chunk& chunk : chunks) {
    CHECK(chunk.doc_id == "doc1");
    CHECK(chunk.title == "title");
    CHECK(chunk.text == doc.body.substr(chunk.span_start, chunk.span_end - chunk.span_start));
  }
}

TEST_CASE("a short body yields a single chunk covering everything") {
  Document doc{"d", "", "tiny body"};
  const auto chunks = chunk_document(doc, ChunkOptions{400, 100, 50});
  REQUIRE(chunks.size() == 1);
  CHECK(chunks[0].text == "tiny body");
  CHECK(chunks[0].span_start == 0);
  CHECK(chunks[0].span_end == 9);
}

TEST_CASE("chunk ends shift left onto whitespace inside the window") {
  //            0123456789012345678901234
  Document doc{"d", "", "aaaa bbbb cccc dddd eeee"};
  ChunkOptions options{10, 2, 5};
  const auto chunks = chunk_document(doc, options);
  REQUIRE(chunks.size() == 4);
  CHECK(chunks[0].text == "aaaa bbbb");
  CHECK(chunks[1].text == "bb cccc");
  CHECK(chunks[2].text == "cc dddd");
  CHECK(chunks[3].text == "dd eeee");
  CHECK(chunks[0].span_end == 9);
  CHECK(chunks[1].span_start == 7);
  CHECK(chunks[3].span_end == doc.body.size());
}

TEST_CASE("chunking rejects impossible configurations") {
  Document doc{"d", "", "some body"};
  CHECK_THROWS_AS(chunk_document(doc, ChunkOptions{0, 0, 0}), InvalidChunking);
  CHECK_THROWS_AS(chunk_document(doc, ChunkOptions{100, 100, 0}), InvalidChunking);
  CHECK_THROWS_AS(chunk_document(doc, ChunkOptions{100, 150, 0}), InvalidChunking);
  Document empty{"d", "", ""};
  CHECK_THROWS_AS(chunk_document(empty, ChunkOptions{100, 10, 0}), InvalidChunking);
}

TEST_CASE("random bodies reassemble exactly from their chunks") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t length = 1 + rng() % 3000;
    const std::string body = random_body(rng, length);
    ChunkOptions options;
    options.chunk_size = 50 + rng() % 250;
    options.overlap = rng() % options.chunk_size;
    options.whitespace_window = rng() % 60;
    Document doc{"d", "", body};

    const auto chunks = chunk_document(doc, options);
    REQUIRE(!chunks.empty());
    CHECK(chunks.front().span_start == 0);
    CHECK(chunks.back().span_end == body.size());

    std::string rebuilt = chunks.front().text;
    for (size_t i = 0; i < chunks.size(); ++i) {
      const Chunk& chunk = chunks[i];
      REQUIRE(chunk.span_end > chunk.span_start);
      CHECK(chunk.span_end - chunk.span_start <= options.chunk_size);
      CHECK(chunk.text == body.substr(chunk.span_start, chunk.span_end - chunk.span_start));
      if (i > 0) {
        CHECK(chunk.span_start == chunks[i - 1].span_end - options.overlap);
        CHECK(chunk.span_end > chunks[i - 1].span_end);
        REQUIRE(chunk.text.size() > options.overlap);
        rebuilt += chunk.text.substr(options.overlap);
      }
    }
    CHECK(rebuilt == body);
  }
}

TEST_CASE("the corpus loader validates records and line numbers failures") {
  testsupport::TempDir dir;
  testsupport::write_file(dir.file("good.jsonl"),
                          "{\"doc_id\": \"a\", \"title\": \"T\", \"body\": \"body a\"}\n"
                          "\n"
                          "{\"doc_id\": \"b\", \"body\": \"body b\"}\n");
  const auto docs = load_corpus_jsonl(dir.file("good.jsonl"));
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].doc_id == "a");
  CHECK(docs[0].title == "T");
  CHECK(docs[1].title == "");
  CHECK(docs[1].body == "body b");

  testsupport::write_file(dir.file("nobody.jsonl"), "{\"doc_id\": \"a\"}\n");
  CHECK_THROWS_AS(load_corpus_jsonl(dir.file("nobody.jsonl")), FormatError);

  testsupport::write_file(dir.file("dup.jsonl"),
                          "{\"doc_id\": \"a\", \"body\": \"x\"}\n"
                          "{\"doc_id\": \"a\", \"body\": \"y\"}\n");
  try {
    load_corpus_jsonl(dir.file("dup.jsonl"));
    FAIL("expected FormatError");
  } catch (const FormatError& ex) {
    const std::string message = ex.what();
    CHECK(message.find("line 2") != std::string::npos);
    CHECK(message.find("duplicate doc_id") != std::string::npos);
  }

  CHECK_THROWS_AS(load_corpus_jsonl(dir.file("missing.jsonl")), FormatError);
}

TEST_CASE("the corpus fingerprint tracks content and order") {
  std::vector<Document> docs = {{"a", "t", "one"}, {"b", "", "two"}};
  const std::string fp = corpus_fingerprint(docs);
  CHECK(fp.size() == 16);
  CHECK(fp == corpus_fingerprint(docs));

  std::vector<Document> edited = docs;
  edited[1].body = "two!";
  CHECK(fp != corpus_fingerprint(edited));

  std::vector<Document> reordered = {docs[1], docs[0]};
  CHECK(fp != corpus_fingerprint(reordered));
}

TEST_CASE("build_index embeds every chunk and seals a canonical order") {
  ScriptedGateway gateway(std::vector<FixtureEntry>{});
  const auto chunks = word_chunks({"renal cortex blood", "coronary sinus drainage",
                                   "alveolar gas exchange"});
  BuildOptions options;
  options.chunk_size = 100;
  options.overlap = 10;
  options.corpus_fingerprint = "feedfacefeedface";

  const VectorIndex index = build_index(chunks, gateway, options);
  CHECK(index.dim == 64);
  REQUIRE(index.entries.size() == 3);
  REQUIRE(index.chunks.size() == 3);
  CHECK(index.metadata.embedder_id == "hash64-d64-s0");
  CHECK(index.metadata.chunk_size == 100);
  CHECK(index.metadata.overlap == 10);
  CHECK(index.metadata.corpus_fingerprint == "feedfacefeedface");
  CHECK(std::is_sorted(index.entries.begin(), index.entries.end(),
                       [](const IndexEntry& a, const IndexEntry& b) {
                         return a.chunk_id < b.chunk_id;
                       }));
  for (size_t i = 0; i < index.entries.size(); ++i) {
    CHECK(index.entries[i].chunk_id == index.chunks[i].chunk_id);
    double norm_sq = 0.0;
    for (float v : index.entries[i].vector.values)
      norm_sq += static_cast<double>(v) * static_cast<double>(v);
    CHECK(std::abs(index.entries[i].norm - std::sqrt(norm_sq)) < 1e-6);
  }
}

TEST_CASE("the built index is independent of the embedding batch size") {
  std::vector<std::string> texts;
  for (int i = 0; i < 17; ++i) texts.push_back("chunk text number " + std::to_string(i));
  const auto chunks = word_chunks(texts);

  ScriptedGateway one(std::vector<FixtureEntry>{});
  ScriptedGateway many(std::vector<FixtureEntry>{});
  BuildOptions small;
  small.embed_batch = 1;
  BuildOptions large;
  large.embed_batch = 64;

  const VectorIndex a = build_index(chunks, one, small);
  const VectorIndex b = build_index(chunks, many, large);
  REQUIRE(a.entries.size() == b.entries.size());
  for (size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].chunk_id == b.entries[i].chunk_id);
    CHECK(a.entries[i].vector.values == b.entries[i].vector.values);
    CHECK(a.entries[i].norm == b.entries[i].norm);
  }
}

TEST_CASE("index building rejects empty and duplicated inputs") {
  ScriptedGateway gateway(std::vector<FixtureEntry>{});
  CHECK_THROWS_AS(build_index({}, gateway), EmptyCorpus);

  auto chunks = word_chunks({"one", "two"});
  chunks[1].chunk_id = chunks[0].chunk_id;
  CHECK_THROWS_AS(build_index(chunks, gateway), DuplicateChunkId);
}

TEST_CASE("retrieval matches an independent brute-force ranking") {
  std::mt19937_64 rng(777);
  std::vector<std::string> texts;
  for (int i = 0; i < 200; ++i) {
    std::string text;
    for (int w = 0; w < 1 + static_cast<int>(rng() % 6); ++w) {
      text += "w" + std::to_string(rng() % 40) + " ";
    }
    texts.push_back(text);
  }
  ScriptedGateway gateway(std::vector<FixtureEntry>{});
  const VectorIndex index = build_index(word_chunks(texts), gateway);
  const EmbeddingVector query = gateway.embed({"w3 w17 w29"}).front();

  const auto snippets = retrieve_top_k(index, query, 7);
  REQUIRE(snippets.size() == 7);

  // Rank every entry with the same double-precision arithmetic the scan
  // uses, then fully sort.
  struct Ranked {
    double score;
    std::string chunk_id;
    std::string text;
  };
  std::vector<Ranked> ranked;
  double query_norm = 0.0;
  for (float v : query.values) query_norm += static_cast<double>(v) * static_cast<double>(v);
  query_norm = std::sqrt(query_norm);
  for (size_t i = 0; i < index.entries.size(); ++i) {
    const auto& values = index.entries[i].vector.values;
    double dot = 0.0;
    double entry_norm = 0.0;
    for (size_t d = 0; d < values.size(); ++d) {
      dot += static_cast<double>(query.values[d]) * static_cast<double>(values[d]);
      entry_norm += static_cast<double>(values[d]) * static_cast<double>(values[d]);
    }
    entry_norm = std::sqrt(entry_norm);
    ranked.push_back(Ranked{dot / (query_norm * entry_norm), index.entries[i].chunk_id,
                            index.chunks[i].text});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.chunk_id < b.chunk_id;
  });

  for (size_t i = 0; i < snippets.size(); ++i) {
    CHECK(snippets[i].chunk_id == ranked[i].chunk_id);
    CHECK(snippets[i].score == ranked[i].score);
    CHECK(snippets[i].text == ranked[i].text);
  }
}

TEST_CASE("retrieval edge cases behave predictably") {
  ScriptedGateway gateway(std::vector<FixtureEntry>{});
  const VectorIndex index = build_index(word_chunks({"alpha", "beta", "gamma"}), gateway);

  CHECK(retrieve_top_k(index, gateway.embed({"alpha"}).front(), 0).empty());
  CHECK(retrieve_top_k(index, gateway.embed({"alpha"}).front(), 50).size() == 3);

  // A query identical to an indexed chunk ranks that chunk first with
  // cosine similarity 1.
  const auto top = retrieve_top_k(index, gateway.embed({"beta"}).front(), 1);
  REQUIRE(top.size() == 1);
  CHECK(top[0].text == "beta");
  CHECK(std::abs(top[0].score - 1.0) < 1e-9);

  // A zero query vector scores everything 0 and falls back to id order.
  EmbeddingVector zero;
  zero.values.assign(64, 0.0f);
  const auto zeros = retrieve_top_k(index, zero, 2);
  REQUIRE(zeros.size() == 2);
  CHECK(zeros[0].score == 0.0);
  CHECK(zeros[0].chunk_id < zeros[1].chunk_id);

  EmbeddingVector narrow;
  narrow.values.assign(8, 0.5f);
  CHECK_THROWS_AS(retrieve_top_k(index, narrow, 1), DimensionMismatch);
}

TEST_CASE("an index round-trips through its file format bit for bit") {
  testsupport::TempDir dir;
  ScriptedGateway gateway(std::vector<FixtureEntry>{});
  const auto chunks =
      word_chunks({"renal cortex", "coronary sinus", "alveolar membrane", "portal vein"});
  BuildOptions options;
  options.chunk_size = 77;
  options.overlap = 7;
  options.corpus_fingerprint = "0011223344556677";
  const VectorIndex index = build_index(chunks, gateway, options);

  save_index(index, dir.file("index.bin"));
  const VectorIndex loaded = load_index(dir.file("index.bin"));

  CHECK(loaded.dim == index.dim);
  CHECK(loaded.metadata.embedder_id == index.metadata.embedder_id);
  CHECK(loaded.metadata.chunk_size == index.metadata.chunk_size);
  CHECK(loaded.metadata.overlap == index.metadata.overlap);
  CHECK(loaded.metadata.corpus_fingerprint == index.metadata.corpus_fingerprint);
  REQUIRE(loaded.entries.size() == index.entries.size());
  REQUIRE(loaded.chunks.size() == index.chunks.size());
  for (size_t i = 0; i < index.entries.size(); ++i) {
    CHECK(loaded.entries[i].chunk_id == index.entries[i].chunk_id);
    CHECK(loaded.entries[i].vector.values == index.entries[i].vector.values);
    CHECK(loaded.entries[i].norm == index.entries[i].norm);
    CHECK(loaded.chunks[i].chunk_id == index.chunks[i].chunk_id);
    CHECK(loaded.chunks[i].doc_id == index.chunks[i].doc_id);
    CHECK(loaded.chunks[i].text == index.chunks[i].text);
  }

  // Writing the same index again produces identical bytes.
  save_index(index, dir.file("again.bin"));
  CHECK(testsupport::read_file(dir.file("index.bin")) ==
        testsupport::read_file(dir.file("again.bin")));
}

TEST_CASE("index file damage is classified as corruption or truncation") {
  testsupport::TempDir dir;
  ScriptedGateway gateway(std::vector<FixtureEntry>{});
  const VectorIndex index = build_index(word_chunks({"alpha beta", "gamma delta"}), gateway);
  save_index(index, dir.file("index.bin"));
  const std::string original = testsupport::read_file(dir.file("index.bin"));
  REQUIRE(original.size() > 50);

  // Flip a byte inside the entry payload, just ahead of the checksum.
  std::string flipped = original;
  flipped[flipped.size() - 5] = static_cast<char>(flipped[flipped.size() - 5] ^ 0x40);
  testsupport::write_file(dir.file("flipped.bin"), flipped);
  CHECK_THROWS_AS(load_index(dir.file("flipped.bin")), ChecksumMismatch);

  // Cutting into the payload shifts the checksum frame, so it reads as
  // corruption; cutting into the header metadata is detectable truncation.
  testsupport::write_file(dir.file("short.bin"), original.substr(0, original.size() - 3));
  CHECK_THROWS_AS(load_index(dir.file("short.bin")), ChecksumMismatch);
  testsupport::write_file(dir.file("stub.bin"), original.substr(0, 30));
  CHECK_THROWS_WITH_AS(load_index(dir.file("stub.bin")), "index file truncated", FormatError);

  std::string bad_magic = original;
  bad_magic[0] = 'X';
  testsupport::write_file(dir.file("magic.bin"), bad_magic);
  CHECK_THROWS_AS(load_index(dir.file("magic.bin")), FormatError);

  std::string bad_version = original;
  bad_version[4] = 9;
  testsupport::write_file(dir.file("version.bin"), bad_version);
  CHECK_THROWS_AS(load_index(dir.file("version.bin")), FormatError);

  // Bytes appended after the checksum shift the trailer frame, so the
  // checksum no longer matches.
  testsupport::write_file(dir.file("appended.bin"), original + "zz");
  CHECK_THROWS_AS(load_index(dir.file("appended.bin")), ChecksumMismatch);

  // Padding inside the checksummed payload passes the checksum but leaves
  // unread bytes after the last entry.
  auto u32_at = [&](size_t pos) {
    uint32_t value = 0;
    for (int i = 0; i < 4; ++i)
      value |= static_cast<uint32_t>(static_cast<unsigned char>(original[pos + i])) << (8 * i);
    return value;
  };
  const size_t payload_begin = 24 + u32_at(20);
  const size_t crc_pos = original.size() - 4;
  std::string padded = original.substr(0, crc_pos) + std::string(4, '\0');
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(padded.data() + payload_begin),
              static_cast<uInt>(padded.size() - payload_begin));
  for (int i = 0; i < 4; ++i)
    padded.push_back(static_cast<char>((static_cast<uint32_t>(crc) >> (8 * i)) & 0xff));
  testsupport::write_file(dir.file("padded.bin"), padded);
  CHECK_THROWS_AS(load_index(dir.file("padded.bin")), FormatError);

  CHECK_THROWS_AS(load_index(dir.file("missing.bin")), FormatError);
}
