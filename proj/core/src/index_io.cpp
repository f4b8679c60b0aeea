#include "discussrag/index_io.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>
#include <zlib.h>

namespace discussrag {

namespace {

constexpr char kMagic[4] = {'D', 'R', 'I', 'X'};
constexpr uint32_t kVersion = 1;

void append_u32(std::string& out, uint32_t value) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

void append_u64(std::string& out, uint64_t value) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

void append_f32(std::string& out, float value) {
  char bytes[4];
  std::memcpy(bytes, &value, 4);
  out.append(bytes, 4);
}

class Reader {
 public:
  Reader(const std::string& data, size_t begin, size_t end) : data_(data), pos_(begin), end_(end) {}

  uint32_t u32() {
    require(4);
    uint32_t value = 0;
    for (int i = 0; i < 4; ++i)
      value |= static_cast<uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return value;
  }

  uint64_t u64() {
    require(8);
    uint64_t value = 0;
    for (int i = 0; i < 8; ++i)
      value |= static_cast<uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return value;
  }

  float f32() {
    require(4);
    float value;
    std::memcpy(&value, data_.data() + pos_, 4);
    pos_ += 4;
    return value;
  }

  std::string bytes(size_t count) {
    require(count);
    std::string value = data_.substr(pos_, count);
    pos_ += count;
    return value;
  }

  size_t pos() const { return pos_; }
  size_t remaining() const { return end_ - pos_; }

 private:
  void require(size_t count) {
    if (end_ - pos_ < count) throw FormatError("index file truncated");
  }

  const std::string& data_;
  size_t pos_;
  size_t end_;
};

uint32_t payload_crc(const std::string& data, size_t begin, size_t end) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data() + begin),
              static_cast<uInt>(end - begin));
  return static_cast<uint32_t>(crc);
}

}  // namespace

void save_index(const VectorIndex& index, const std::filesystem::path& path) {
  nlohmann::json chunks = nlohmann::json::array();
  for (const ChunkInfo& info : index.chunks)
    chunks.push_back({{"chunk_id", info.chunk_id},
                      {"doc_id", info.doc_id},
                      {"title", info.title},
                      {"text", info.text}});
  nlohmann::json metadata = {
      {"embedder_id", index.metadata.embedder_id},
      {"chunk_size", index.metadata.chunk_size},
      {"overlap", index.metadata.overlap},
      {"corpus_fingerprint", index.metadata.corpus_fingerprint},
      {"chunks", std::move(chunks)},
  };
  const std::string metadata_bytes = metadata.dump();

  std::string header;
  header.append(kMagic, 4);
  append_u32(header, kVersion);
  append_u32(header, index.dim);
  append_u64(header, index.entries.size());
  append_u32(header, static_cast<uint32_t>(metadata_bytes.size()));
  header += metadata_bytes;

  std::string payload;
  for (const IndexEntry& entry : index.entries) {
    append_u32(payload, static_cast<uint32_t>(entry.chunk_id.size()));
    payload += entry.chunk_id;
    for (float v : entry.vector.values) append_f32(payload, v);
    append_f32(payload, entry.norm);
  }

  std::string trailer;
  append_u32(trailer, payload_crc(payload, 0, payload.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write index file: " + path.string());
  out << header << payload << trailer;
  out.flush();
  if (!out) throw FormatError("failed writing index file: " + path.string());
}

VectorIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open index file: " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (data.size() < 4 || std::memcmp(data.data(), kMagic, 4) != 0)
    throw FormatError("not an index file (bad magic): " + path.string());

  Reader header(data, 4, data.size());
  const uint32_t version = header.u32();
  if (version != kVersion)
    throw FormatError("unsupported index version " + std::to_string(version));

  VectorIndex index;
  index.dim = header.u32();
  const uint64_t entry_count = header.u64();
  const uint32_t metadata_len = header.u32();
  const std::string metadata_bytes = header.bytes(metadata_len);

  if (data.size() < header.pos() + 4) throw FormatError("index file truncated");
  const size_t payload_begin = header.pos();
  const size_t payload_end = data.size() - 4;

  Reader trailer(data, payload_end, data.size());
  const uint32_t stored_crc = trailer.u32();
  if (payload_crc(data, payload_begin, payload_end) != stored_crc)
    throw ChecksumMismatch("index payload checksum mismatch: " + path.string());

  nlohmann::json metadata;
  try {
    metadata = nlohmann::json::parse(metadata_bytes);
    index.metadata.embedder_id = metadata.value("embedder_id", "");
    index.metadata.chunk_size = metadata.value("chunk_size", 0u);
    index.metadata.overlap = metadata.value("overlap", 0u);
    index.metadata.corpus_fingerprint = metadata.value("corpus_fingerprint", "");
    for (const auto& item : metadata.value("chunks", nlohmann::json::array()))
      index.chunks.push_back(ChunkInfo{item.value("chunk_id", ""), item.value("doc_id", ""),
                                       item.value("title", ""), item.value("text", "")});
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("bad index metadata: ") + ex.what());
  }

  Reader payload(data, payload_begin, payload_end);
  index.entries.reserve(entry_count);
  for (uint64_t i = 0; i < entry_count; ++i) {
    IndexEntry entry;
    const uint32_t id_len = payload.u32();
    entry.chunk_id = payload.bytes(id_len);
    entry.vector.values.resize(index.dim);
    for (uint32_t d = 0; d < index.dim; ++d) entry.vector.values[d] = payload.f32();
    entry.norm = payload.f32();
    index.entries.push_back(std::move(entry));
  }
  if (payload.remaining() != 0) throw FormatError("index file has trailing payload bytes");
  if (index.chunks.size() != index.entries.size())
    throw FormatError("index metadata lists " + std::to_string(index.chunks.size()) +
                      " chunks for " + std::to_string(index.entries.size()) + " entries");
  return index;
}

}  // namespace discussrag
