#pragma once

#include <filesystem>

#include "discussrag/vector_index.hpp"

namespace discussrag {

// Binary index file, little-endian:
//   magic "DRIX" | version u32 | dim u32 | entry count u64
//   metadata length u32 | metadata JSON (embedder, chunking, corpus
//   fingerprint, per-chunk text in entry order)
//   per entry: chunk_id length u32 + bytes | dim f32 values | f32 norm
//   CRC32 of the entry payload
// Vectors are stored as the same f32 values held in memory, so a round
// trip is bitwise exact.
void save_index(const VectorIndex& index, const std::filesystem::path& path);

// Verifies magic, version, and payload checksum before touching entries:
// a flipped payload byte is ChecksumMismatch, structural damage is
// FormatError.
VectorIndex load_index(const std::filesystem::path& path);

}  // namespace discussrag
