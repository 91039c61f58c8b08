#include "fairmap/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <map>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "fairmap/errors.hpp"
#include "fairmap/io_util.hpp"
#include "httplib.h"
#include "json.hpp"

namespace fairmap {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Corpus

std::vector<CorpusRecord> parse_corpus(std::string_view text) {
  std::vector<CorpusRecord> records;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  for (const auto line : split_lines(text)) {
    ++line_no;
    if (is_blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw ParseError("malformed corpus line", line_no);
    }
    if (!j.is_object()) throw ParseError("corpus line is not an object", line_no);
    CorpusRecord rec;
    const auto id = j.find("id");
    const auto txt = j.find("text");
    if (id == j.end() || !id->is_string()) throw ParseError("missing string field \"id\"", line_no);
    if (txt == j.end() || !txt->is_string()) throw ParseError("missing string field \"text\"", line_no);
    rec.id = id->get<std::string>();
    rec.text = txt->get<std::string>();
    if (rec.id.empty()) throw ParseError("empty record id", line_no);
    if (rec.id.find_first_of("\t\n\r") != std::string::npos) {
      throw ParseError("record id '" + rec.id + "' contains a tab or newline", line_no);
    }
    if (rec.text.empty()) throw ParseError("record '" + rec.id + "' has empty text", line_no);
    if (const auto lbl = j.find("label"); lbl != j.end() && !lbl->is_null()) {
      if (!lbl->is_number_integer()) throw ParseError("label must be 1 or -1", line_no);
      const auto v = lbl->get<long long>();
      if (v != 1 && v != -1) {
        throw ParseError("label " + std::to_string(v) + " is not 1 or -1", line_no);
      }
      rec.label = static_cast<int>(v);
    }
    if (!seen.insert(rec.id).second) throw ParseError("duplicate record id '" + rec.id + "'", line_no);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<CorpusRecord> load_corpus(const std::filesystem::path& path) {
  return parse_corpus(read_file(path));
}

std::string format_corpus(std::span<const CorpusRecord> records) {
  std::string out;
  for (const auto& r : records) {
    json j{{"id", r.id}, {"text", r.text}};
    if (r.label) j["label"] = *r.label;
    out += j.dump();
    out += '\n';
  }
  return out;
}

LabelMap corpus_labels(std::span<const CorpusRecord> records) {
  LabelMap labels;
  for (const auto& r : records) {
    if (r.label) labels.emplace(r.id, *r.label);
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Embedding files

namespace {

constexpr std::string_view kBinaryMagic = "FMAPEMB1";
constexpr std::string_view kTextFormat = "fairmap.embeddings.text/1";
constexpr std::string_view kCacheMagic = "FMAPVEC1";

template <typename T>
void put_le(std::string& out, T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    out.append(bytes.data(), bytes.size());
  } else {
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    out.append(bytes, sizeof(T));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    const auto raw = take(sizeof(T));
    std::array<char, sizeof(T)> buf{};
    std::memcpy(buf.data(), raw.data(), sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf.begin(), buf.end());
    return std::bit_cast<T>(buf);
  }

  std::string_view take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw ParseError("truncated embedding data");
    const auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

Vector checked_vector(std::vector<double> values, std::size_t line = 0) {
  for (double x : values) {
    if (!std::isfinite(x)) throw ParseError("non-finite coordinate", line);
  }
  if (values.empty()) throw ParseError("zero-length vector", line);
  return Vector(std::move(values));
}

EmbeddingFile parse_binary(std::string_view bytes) {
  Reader in(bytes);
  in.take(kBinaryMagic.size());
  EmbeddingFile file;
  file.model = std::string(in.take(in.get<std::uint32_t>()));
  const auto dim = in.get<std::uint64_t>();
  const auto count = in.get<std::uint64_t>();
  if (dim == 0 && count > 0) throw ParseError("embedding file declares dimension 0");
  if (count > 0 && (bytes.size() / 8) / dim < count) throw ParseError("truncated embedding data");
  std::vector<std::pair<std::string, Vector>> rows;
  rows.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string id(in.take(in.get<std::uint32_t>()));
    std::vector<double> values(dim);
    for (auto& v : values) v = in.get<double>();
    rows.emplace_back(std::move(id), checked_vector(std::move(values)));
  }
  if (!in.done()) throw ParseError("trailing bytes after embedding records");
  try {
    file.cloud = PointCloud::from_records(dim, std::move(rows));
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  return file;
}

EmbeddingFile parse_text(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front().substr(0, 1) != "#") throw ParseError("missing header", 1);
  json header;
  try {
    header = json::parse(lines.front().substr(1));
  } catch (const json::parse_error&) {
    throw ParseError("malformed header", 1);
  }
  EmbeddingFile file;
  std::size_t dim = 0;
  std::size_t count = 0;
  try {
    if (header.at("format").get<std::string>() != kTextFormat) throw ParseError("unknown format", 1);
    file.model = header.at("model").get<std::string>();
    dim = header.at("dim").get<std::size_t>();
    count = header.at("count").get<std::size_t>();
  } catch (const json::exception&) {
    throw ParseError("header missing format, model, dim or count", 1);
  }
  std::vector<std::pair<std::string, Vector>> rows;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const auto line = lines[ln];
    const std::size_t line_no = ln + 1;
    if (is_blank(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError("missing tab after record id", line_no);
    std::vector<double> values;
    values.reserve(dim);
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double v = 0.0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc{}) throw ParseError("malformed coordinate", line_no);
      values.push_back(v);
      p = res.ptr;
      if (p < end && *p != ' ') throw ParseError("malformed coordinate", line_no);
    }
    if (values.size() != dim) {
      throw ParseError("row has " + std::to_string(values.size()) + " values, expected " +
                           std::to_string(dim),
                       line_no);
    }
    rows.emplace_back(std::string(line.substr(0, tab)), checked_vector(std::move(values), line_no));
  }
  if (rows.size() != count) {
    throw ParseError("header declares " + std::to_string(count) + " records, found " +
                     std::to_string(rows.size()));
  }
  try {
    file.cloud = PointCloud::from_records(dim, std::move(rows));
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  return file;
}

}  // namespace

std::string serialize_embeddings(const PointCloud& cloud, std::string_view model, EmbeddingFormat format) {
  std::string out;
  if (format == EmbeddingFormat::kBinary) {
    out.append(kBinaryMagic);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.size()));
    out.append(model);
    put_le<std::uint64_t>(out, cloud.dim());
    put_le<std::uint64_t>(out, cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cloud.id(i).size()));
      out.append(cloud.id(i));
      for (double v : cloud.row(i)) put_le<double>(out, v);
    }
    return out;
  }
  const json header{{"format", kTextFormat}, {"model", model}, {"dim", cloud.dim()}, {"count", cloud.size()}};
  out += "# " + header.dump() + "\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.id(i).find_first_of("\t\n\r") != std::string::npos) {
      throw InvalidArgumentError("record id '" + cloud.id(i) + "' cannot be written to a text embedding file");
    }
    out += cloud.id(i);
    out += '\t';
    const auto row = cloud.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k > 0) out += ' ';
      out += format_double(row[k]);
    }
    out += '\n';
  }
  return out;
}

EmbeddingFile parse_embeddings(std::string_view bytes) {
  if (bytes.substr(0, kBinaryMagic.size()) == kBinaryMagic) return parse_binary(bytes);
  return parse_text(bytes);
}

void save_embeddings(const std::filesystem::path& path, const PointCloud& cloud, std::string_view model,
                     EmbeddingFormat format) {
  write_file_atomic(path, serialize_embeddings(cloud, model, format));
}

EmbeddingFile load_embedding_file(const std::filesystem::path& path) {
  return parse_embeddings(read_file(path));
}

PointCloud load_precomputed(const std::filesystem::path& path) { return load_embedding_file(path).cloud; }

// ---------------------------------------------------------------------------
// Cache

EmbeddingCache::EmbeddingCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create cache directory '" + dir_.string() + "'");
}

std::string EmbeddingCache::key(std::string_view model, std::string_view text) {
  std::string material;
  put_le<std::uint64_t>(material, model.size());
  material.append(model);
  material.append(text);
  return sha256_hex(material);
}

std::filesystem::path EmbeddingCache::entry_path(std::string_view model, std::string_view text) const {
  return dir_ / key(model, text);
}

std::optional<Vector> EmbeddingCache::lookup(std::string_view model, std::string_view text) const {
  const auto path = entry_path(model, text);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  const std::string bytes = read_file(path);
  Reader in(bytes);
  if (in.take(kCacheMagic.size()) != kCacheMagic) throw ParseError("bad cache entry " + path.string());
  const auto stored_model = in.take(in.get<std::uint32_t>());
  if (stored_model != model) throw ParseError("cache entry model mismatch in " + path.string());
  const auto dim = in.get<std::uint64_t>();
  if (dim == 0 || (bytes.size() / 8) < dim) throw ParseError("bad cache entry " + path.string());
  std::vector<double> values(dim);
  for (auto& v : values) v = in.get<double>();
  return checked_vector(std::move(values));
}

void EmbeddingCache::store(std::string_view model, std::string_view text, const Vector& v) const {
  const auto path = entry_path(model, text);
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) return;
  std::string bytes(kCacheMagic);
  put_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(model.size()));
  bytes.append(model);
  put_le<std::uint64_t>(bytes, v.dim());
  for (double x : v.values()) put_le<double>(bytes, x);
  write_file_atomic(path, bytes);
}

// ---------------------------------------------------------------------------
// Endpoint client

void EndpointConfig::validate() const {
  if (max_concurrent_requests < 1) throw InvalidArgumentError("max_concurrent_requests must be >= 1");
  if (max_attempts < 1) throw InvalidArgumentError("max_attempts must be >= 1");
  if (batch_size < 1) throw InvalidArgumentError("batch_size must be >= 1");
  if (model.empty()) throw InvalidArgumentError("model name is required");
}

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix without trailing slash
};

ParsedUrl parse_base_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw InvalidArgumentError("endpoint URL needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

class EmbeddingClient {
 public:
  EmbeddingClient(const EndpointConfig& config, std::atomic<std::size_t>& requests)
      : config_(config), url_(parse_base_url(config.base_url)), client_(url_.origin), requests_(requests) {
    client_.set_connection_timeout(config.timeout);
    client_.set_read_timeout(config.timeout);
    client_.set_write_timeout(config.timeout);
    if (const char* token = std::getenv(config.auth_token_env_var.c_str()); token && *token) {
      client_.set_bearer_token_auth(token);
    }
  }

  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) {
    const std::string body = json{{"model", config_.model}, {"input", texts}}.dump();
    std::string last_error;
    for (std::size_t attempt = 1; attempt <= config_.max_attempts; ++attempt) {
      if (attempt > 1) std::this_thread::sleep_for(config_.base_backoff * (1LL << (attempt - 2)));
      requests_.fetch_add(1);
      auto res = client_.Post(url_.path + "/embeddings", body, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        throw EndpointError("embeddings endpoint returned HTTP " + std::to_string(res->status));
      }
      return parse_response(res->body, texts.size());
    }
    throw EndpointError("embeddings endpoint failed after " + std::to_string(config_.max_attempts) +
                        " attempts (" + last_error + ")");
  }

 private:
  static std::vector<std::vector<double>> parse_response(const std::string& body, std::size_t expected) {
    std::vector<std::vector<double>> out(expected);
    std::vector<bool> filled(expected, false);
    try {
      const json j = json::parse(body);
      const auto& data = j.at("data");
      if (data.size() != expected) throw EndpointError("embeddings response has the wrong number of items");
      for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& item = data[i];
        const std::size_t index = item.contains("index") ? item.at("index").get<std::size_t>() : i;
        if (index >= expected || filled[index]) throw EndpointError("embeddings response has a bad index");
        out[index] = item.at("embedding").get<std::vector<double>>();
        filled[index] = true;
      }
    } catch (const json::exception& e) {
      throw EndpointError(std::string("malformed embeddings response: ") + e.what());
    }
    return out;
  }

  const EndpointConfig& config_;
  ParsedUrl url_;
  httplib::Client client_;
  std::atomic<std::size_t>& requests_;
};

}  // namespace

PointCloud fetch_embeddings(std::span<const CorpusRecord> records, const EndpointConfig& config,
                            const std::filesystem::path& cache_dir, FetchStats* stats) {
  FetchStats local;
  local.records = records.size();
  const EmbeddingCache cache(cache_dir);

  std::map<std::string, Vector, std::less<>> by_text;
  std::vector<std::string> missing;
  std::unordered_set<std::string> missing_set;
  for (const auto& r : records) {
    if (by_text.contains(r.text) || missing_set.contains(r.text)) continue;
    if (auto v = cache.lookup(config.model, r.text)) {
      by_text.emplace(r.text, std::move(*v));
    } else {
      missing_set.insert(r.text);
      missing.push_back(r.text);
    }
  }

  if (!missing.empty()) {
    if (config.base_url.empty()) {
      throw EndpointError(std::to_string(missing.size()) + " texts are not cached and no endpoint was given");
    }
    config.validate();
    std::vector<std::vector<std::string>> batches;
    for (std::size_t i = 0; i < missing.size(); i += config.batch_size) {
      const auto end = std::min(missing.size(), i + config.batch_size);
      batches.emplace_back(missing.begin() + static_cast<std::ptrdiff_t>(i),
                           missing.begin() + static_cast<std::ptrdiff_t>(end));
    }
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> requests{0};
    std::atomic<std::size_t> fetched{0};
    std::atomic<bool> stop{false};
    std::mutex mu;
    std::exception_ptr failure;
    auto worker = [&] {
      try {
        EmbeddingClient client(config, requests);
        for (std::size_t b = next.fetch_add(1); b < batches.size() && !stop; b = next.fetch_add(1)) {
          const auto vectors = client.embed(batches[b]);
          std::vector<Vector> checked;
          checked.reserve(vectors.size());
          for (const auto& v : vectors) {
            try {
              checked.emplace_back(v);
            } catch (const InvalidArgumentError&) {
              throw EndpointError("endpoint returned an empty or non-finite vector");
            }
          }
          for (std::size_t i = 0; i < checked.size(); ++i) cache.store(config.model, batches[b][i], checked[i]);
          fetched += checked.size();
          std::lock_guard lock(mu);
          for (std::size_t i = 0; i < checked.size(); ++i) by_text.emplace(batches[b][i], std::move(checked[i]));
        }
      } catch (...) {
        stop = true;
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    };
    const std::size_t workers = std::min(config.max_concurrent_requests, batches.size());
    {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    }
    local.requests = requests.load();
    local.fetched = fetched.load();
    if (stats) *stats = local;
    if (failure) std::rethrow_exception(failure);
  }

  std::size_t dim = 0;
  std::vector<std::pair<std::string, Vector>> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    const Vector& v = by_text.at(r.text);
    if (dim == 0) dim = v.dim();
    if (v.dim() != dim) {
      throw DimensionError("embedding for record '" + r.id + "' has dimension " + std::to_string(v.dim()) +
                           ", expected " + std::to_string(dim));
    }
    if (!missing_set.contains(r.text)) local.cache_hits++;
    rows.emplace_back(r.id, v);
  }
  if (stats) *stats = local;
  return PointCloud::from_records(dim, std::move(rows));
}

}  // namespace fairmap
