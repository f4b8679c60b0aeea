#pragma once

#include <stdexcept>
#include <string>

namespace discussrag {

// Base class for every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A request violated the caller-side contract (empty messages, bad config, ...).
class InvalidRequest : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// --- gateway ---

// Network or HTTP failure that survived the retry budget.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Non-retryable API error (4xx, malformed body).
class BackendRefusal : public Error {
 public:
  using Error::Error;
};

// The scripted backend has no matching entry left. Signals a broken test
// fixture, so higher layers never swallow it.
class FixtureExhausted : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// --- corpus / index ---

class InvalidChunking : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class DuplicateChunkId : public Error {
 public:
  using Error::Error;
};

// Index file failed a structural check (magic, version, truncation).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Index file parsed but the payload checksum does not match.
class ChecksumMismatch : public Error {
 public:
  using Error::Error;
};

// --- agents ---

class RosterParseError : public Error {
 public:
  using Error::Error;
};

class AllDeclined : public Error {
 public:
  using Error::Error;
};

class VerdictParseError : public Error {
 public:
  using Error::Error;
};

// --- datasets ---

class DatasetFormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace discussrag
