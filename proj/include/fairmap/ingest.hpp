#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairmap/nerve.hpp"
#include "fairmap/vectorspace.hpp"

namespace fairmap {

struct CorpusRecord {
  std::string id;
  std::string text;
  std::optional<int> label;  // -1 unfair, +1 fair
};

// Corpus file: UTF-8, one JSON object per line with "id", "text" and an
// optional "label" (1, -1 or null). Blank lines are skipped. Throws ParseError
// carrying the line number.
std::vector<CorpusRecord> parse_corpus(std::string_view text);
std::vector<CorpusRecord> load_corpus(const std::filesystem::path& path);
std::string format_corpus(std::span<const CorpusRecord> records);

LabelMap corpus_labels(std::span<const CorpusRecord> records);

// ---------------------------------------------------------------------------
// Embedding files.
//
// Binary layout, all integers and floats little-endian:
//   8 bytes   magic "FMAPEMB1"
//   u32       model name length, then that many UTF-8 bytes
//   u64       dim
//   u64       count
//   count x { u32 id length, id bytes, dim x f64 }
//
// Text layout (fixtures):
//   # {"count":N,"dim":D,"format":"fairmap.embeddings.text/1","model":"..."}
//   <id>\t<v1> <v2> ... <vD>
// Values use shortest round-trip decimal, so both layouts are bit-exact.
// Record ids may not contain tabs or newlines.

enum class EmbeddingFormat { kBinary, kText };

struct EmbeddingFile {
  std::string model;
  PointCloud cloud;
};

std::string serialize_embeddings(const PointCloud& cloud, std::string_view model, EmbeddingFormat format);
EmbeddingFile parse_embeddings(std::string_view bytes);
void save_embeddings(const std::filesystem::path& path, const PointCloud& cloud, std::string_view model,
                     EmbeddingFormat format);
EmbeddingFile load_embedding_file(const std::filesystem::path& path);
// Throws ParseError on ragged rows or non-finite values.
PointCloud load_precomputed(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Embedding cache: one immutable file per (model, text), named by the hex
// SHA-256 of the length-prefixed model name followed by the text bytes.

class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::filesystem::path dir);

  static std::string key(std::string_view model, std::string_view text);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path entry_path(std::string_view model, std::string_view text) const;

  std::optional<Vector> lookup(std::string_view model, std::string_view text) const;
  // Atomic write-then-rename. An existing entry is left untouched.
  void store(std::string_view model, std::string_view text, const Vector& v) const;

 private:
  std::filesystem::path dir_;
};

struct EndpointConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8080/v1
  std::string model;
  std::string auth_token_env_var = "EMBEDDINGS_API_KEY";
  std::size_t max_concurrent_requests = 4;
  std::size_t max_attempts = 4;
  std::chrono::milliseconds base_backoff{250};
  std::size_t batch_size = 64;
  std::chrono::seconds timeout{60};

  void validate() const;
};

struct FetchStats {
  std::size_t records = 0;
  std::size_t cache_hits = 0;   // records served from the cache
  std::size_t fetched = 0;      // distinct texts fetched over the network
  std::size_t requests = 0;     // HTTP attempts, including retries

  double hit_ratio() const noexcept {
    return records == 0 ? 1.0 : static_cast<double>(cache_hits) / static_cast<double>(records);
  }
};

// Consults the cache first and fetches the misses from POST {base_url}/embeddings
// in batches, with at most max_concurrent_requests in flight and exponential
// backoff on transport errors, 429 and 5xx. Every successful batch is cached
// immediately. Throws DimensionError when vectors disagree in dimension and
// EndpointError when retries are exhausted.
PointCloud fetch_embeddings(std::span<const CorpusRecord> records, const EndpointConfig& config,
                            const std::filesystem::path& cache_dir, FetchStats* stats = nullptr);

}  // namespace fairmap
