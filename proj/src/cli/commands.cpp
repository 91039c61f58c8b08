#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairmap/cli.hpp"
#include "fairmap/errors.hpp"
#include "fairmap/fairness.hpp"
#include "fairmap/fixtures.hpp"
#include "fairmap/ingest.hpp"
#include "fairmap/io_util.hpp"
#include "fairmap/pipeline.hpp"
#include "fairmap/render.hpp"
#include "json.hpp"

namespace fairmap::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kMaxCliOverlap = 0.95;

struct GlobalOptions {
  std::uint64_t seed = 42;
  std::string threads = "auto";
  bool verbose = false;

  std::size_t thread_count() const {
    if (threads == "auto") return default_thread_count();
    std::size_t n = 0;
    const auto [end, ec] = std::from_chars(threads.data(), threads.data() + threads.size(), n);
    if (ec != std::errc() || end != threads.data() + threads.size()) {
      throw InvalidArgumentError("--threads must be a positive integer or 'auto'");
    }
    if (n < 1) throw InvalidArgumentError("--threads must be a positive integer or 'auto'");
    return n;
  }
};

struct EmbedOptions {
  std::string corpus, endpoint, model, cache, out, format = "binary", token_env = "EMBEDDINGS_API_KEY";
  std::size_t batch_size = 64, max_concurrent = 4, max_attempts = 4;
  long backoff_ms = 250;
};

struct DirectionOptions {
  std::string embeddings, concepts, out;
  bool builtin = false, corrected = false, normalize_concepts = true;
};

struct MapOptions {
  std::string embeddings, direction, out;
  std::size_t intervals = 15;
  double overlap = 0.4;
  std::string clusterer = "single-linkage-gap", metric = "euclidean";
  std::size_t bins = 10, min_pts = 5, max_dim = 1;
  double eps = 0.5;
  bool no_normalize = false;
  std::optional<std::size_t> lens_axis;
};

struct AnalyzeOptions {
  std::string graph, corpus, out;
};

struct RenderOptions {
  std::string graph, format = "dot", colormap = "default", out;
};

struct ConceptsOptions {
  bool corrected = false, as_corpus = false;
  std::string out;
};

struct FixtureOptions {
  std::string kind = "blobs", out_embeddings, out_corpus, out_direction, format = "text";
  std::optional<std::size_t> n, dim;
  std::optional<double> sigma;
  double separation = 4.0;
};

void write_output(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << contents;
  } else {
    write_file_atomic(path, contents);
  }
}

EmbeddingFormat parse_format(const std::string& f) {
  if (f == "binary") return EmbeddingFormat::kBinary;
  if (f == "text") return EmbeddingFormat::kText;
  throw InvalidArgumentError("unknown embedding format '" + f + "'");
}

int cmd_embed(const EmbedOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const auto records = load_corpus(o.corpus);
  if (records.empty()) throw InvalidArgumentError("empty corpus");
  EndpointConfig config;
  config.base_url = o.endpoint;
  config.model = o.model;
  config.auth_token_env_var = o.token_env;
  config.batch_size = o.batch_size;
  config.max_concurrent_requests = o.max_concurrent;
  config.max_attempts = o.max_attempts;
  config.base_backoff = std::chrono::milliseconds(o.backoff_ms);
  config.validate();
  const auto format = parse_format(o.format);
  FetchStats stats;
  const PointCloud cloud = fetch_embeddings(records, config, o.cache, &stats);
  save_embeddings(o.out, cloud, o.model, format);
  out << "records: " << cloud.size() << "\n"
      << "dim: " << cloud.dim() << "\n"
      << "cache_hit_ratio: " << format_double(stats.hit_ratio()) << "\n";
  if (g.verbose) err << "requests: " << stats.requests << ", fetched: " << stats.fetched << "\n";
  return kSuccess;
}

int cmd_direction(const DirectionOptions& o, std::ostream& out) {
  if (o.builtin && !o.concepts.empty()) throw InvalidArgumentError("--builtin and --concepts are exclusive");
  const PointCloud cloud = load_precomputed(o.embeddings);
  std::vector<ConceptPair> pairs =
      o.concepts.empty()
          ? default_concept_table(o.corrected ? ConceptTable::kCorrected : ConceptTable::kVerbatim)
          : load_concept_table(o.concepts);
  if (pairs.empty()) throw InvalidArgumentError("concept table is empty");
  pairs = resolve_concepts(std::move(pairs), cloud);
  const FairnessDirection fd = build_fairness_direction(pairs, o.normalize_concepts);
  write_file_atomic(o.out, format_direction(fd));
  out << "pairs: " << pairs.size() << "\n"
      << "dim: " << fd.direction.dim() << "\n"
      << "raw_norm: " << format_double(fd.raw_norm) << "\n";
  return kSuccess;
}

std::string canonical_map_command(const MapOptions& o) {
  std::ostringstream ss;
  ss << "fairmap map --intervals " << o.intervals << " --overlap " << format_double(o.overlap)
     << " --clusterer " << o.clusterer << " --metric " << o.metric;
  if (o.clusterer == "dbscan") {
    ss << " --eps " << format_double(o.eps) << " --min-pts " << o.min_pts;
  } else {
    ss << " --bins " << o.bins;
  }
  if (o.no_normalize) ss << " --no-normalize";
  if (o.lens_axis) ss << " --lens-axis " << *o.lens_axis;
  ss << " --max-dim " << o.max_dim;
  return ss.str();
}

int cmd_map(const MapOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  if (!(o.overlap >= 0.0 && o.overlap <= kMaxCliOverlap)) {
    throw InvalidArgumentError("--overlap must lie in [0, " + format_double(kMaxCliOverlap) + "]");
  }
  if (o.intervals < 1) throw InvalidArgumentError("--intervals must be at least 1");
  if (o.max_dim < 1 || o.max_dim > kMaxNerveDim) throw InvalidArgumentError("--max-dim must be 1, 2 or 3");

  MapperConfig config;
  config.cover = {o.intervals, o.overlap};
  config.cluster.method = parse_cluster_method(o.clusterer);
  config.cluster.metric = parse_metric(o.metric);
  config.cluster.num_bins = o.bins;
  config.cluster.eps = o.eps;
  config.cluster.min_pts = o.min_pts;
  config.cluster.normalize = !o.no_normalize;
  config.max_dim = o.max_dim;
  config.threads = g.thread_count();
  config.cover.validate();
  config.cluster.validate();

  if (o.direction.empty() == !o.lens_axis.has_value()) {
    throw InvalidArgumentError("give exactly one of --direction and --lens-axis");
  }
  const std::string emb_bytes = read_file(o.embeddings);
  const EmbeddingFile emb = parse_embeddings(emb_bytes);
  if (emb.cloud.empty()) throw InvalidArgumentError("embedding file has no records");
  std::string dir_bytes;
  LensValues lens;
  if (o.lens_axis) {
    if (*o.lens_axis >= emb.cloud.dim()) {
      throw InvalidArgumentError("--lens-axis " + std::to_string(*o.lens_axis) + " is out of range for dimension " +
                                 std::to_string(emb.cloud.dim()));
    }
    lens = coordinate_lens(emb.cloud, *o.lens_axis);
  } else {
    dir_bytes = read_file(o.direction);
    const FairnessDirection fd = parse_direction(dir_bytes);
    if (fd.direction.dim() != emb.cloud.dim()) {
      throw DimensionError("direction has dimension " + std::to_string(fd.direction.dim()) +
                           " but embeddings have dimension " + std::to_string(emb.cloud.dim()));
    }
    lens = score_corpus(emb.cloud, fd);
  }
  if (g.verbose) err << "kernel: " << kernels::backend_name(kernels::active_backend()) << "\n";

  const MapperResult result = run_mapper(emb.cloud, lens, config);
  RenderedGraph graph = colorize(result.complex, lens, ColorMap::heat());
  graph.metadata["command"] = canonical_map_command(o);
  graph.metadata["input.embeddings_sha256"] = sha256_hex(emb_bytes);
  graph.metadata["input.embeddings_model"] = emb.model;
  if (!o.lens_axis) graph.metadata["input.direction_sha256"] = sha256_hex(dir_bytes);
  graph.metadata["input.points"] = std::to_string(emb.cloud.size());
  graph.metadata["input.dim"] = std::to_string(emb.cloud.dim());
  graph.metadata["lens"] = o.lens_axis ? "coordinate " + std::to_string(*o.lens_axis)
                                       : std::string("cosine similarity with the unit direction");
  graph.metadata["lens.min"] = format_double(lens.min());
  graph.metadata["lens.max"] = format_double(lens.max());
  graph.metadata["cover.type"] = "uniform";
  graph.metadata["cover.n_intervals"] = std::to_string(config.cover.n_intervals);
  graph.metadata["cover.overlap"] = format_double(config.cover.overlap);
  graph.metadata["cluster.method"] = std::string(to_string(config.cluster.method));
  graph.metadata["cluster.metric"] = std::string(to_string(config.cluster.metric));
  graph.metadata["cluster.normalize"] = config.cluster.normalize ? "true" : "false";
  if (config.cluster.method == ClusterMethod::kDbscan) {
    graph.metadata["cluster.eps"] = format_double(config.cluster.eps);
    graph.metadata["cluster.min_pts"] = std::to_string(config.cluster.min_pts);
  } else {
    graph.metadata["cluster.num_bins"] = std::to_string(config.cluster.num_bins);
  }
  graph.metadata["nerve.max_dim"] = std::to_string(config.max_dim);
  write_file_atomic(o.out, to_graph_file(graph));

  const auto betti = betti_numbers_1skeleton(result.complex);
  out << "nodes: " << result.complex.nodes.size() << "\n"
      << "edges: " << result.complex.edge_count() << "\n"
      << "betti0: " << betti.betti0 << "\n"
      << "betti1: " << betti.betti1 << "\n";
  return kSuccess;
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  const RenderedGraph graph = parse_graph_file(read_file(o.graph));
  LabelMap labels;
  if (!o.corpus.empty()) labels = corpus_labels(load_corpus(o.corpus));
  const SimplicialComplex complex = to_complex(graph);
  const SeparationReport r = separation_report(complex, labels);

  json purity = json::array();
  for (const auto& p : r.per_component_purity) purity.push_back(p ? json(*p) : json(nullptr));
  json nodes = json::array();
  for (std::size_t i = 0; i < r.node_labels.size(); ++i) {
    const auto& s = r.node_labels[i];
    nodes.push_back({{"id", i}, {"positive", s.positive}, {"negative", s.negative},
                     {"unlabeled", s.unlabeled}, {"majority", s.majority()}});
  }
  const json report{{"nodes", complex.nodes.size()},
                    {"edges", complex.edge_count()},
                    {"component_count", r.component_count},
                    {"components", r.components},
                    {"betti0", r.betti0},
                    {"betti1", r.betti1},
                    {"per_component_purity", purity},
                    {"cross_edges", r.cross_edges},
                    {"shared_nodes", r.shared_nodes},
                    {"labeled_memberships", r.labeled_memberships},
                    {"node_labels", nodes}};
  write_output(o.out, report.dump(2) + "\n", out);
  if (r.labeled_memberships == 0) {
    err << "error: no graph member has a label; purity is undefined\n";
    return kInputError;
  }
  return kSuccess;
}

int cmd_render(const RenderOptions& o, std::ostream& out) {
  RenderedGraph graph = parse_graph_file(read_file(o.graph));
  ColorScale scale;
  if (o.colormap == "default") {
    scale = ColorScale::kObserved;
  } else if (o.colormap == "pinned") {
    scale = ColorScale::kPinned;
  } else {
    throw InvalidArgumentError("--colormap must be 'default' or 'pinned'");
  }
  const ColorMap cmap = ColorMap::heat();
  recolor(graph, cmap, scale);
  std::string doc;
  if (o.format == "dot") {
    doc = to_dot(graph);
  } else if (o.format == "html") {
    doc = to_html_report(graph, cmap);
  } else {
    throw InvalidArgumentError("--format must be 'dot' or 'html'");
  }
  write_output(o.out, doc, out);
  return kSuccess;
}

int cmd_concepts(const ConceptsOptions& o, std::ostream& out) {
  const auto pairs = default_concept_table(o.corrected ? ConceptTable::kCorrected : ConceptTable::kVerbatim);
  if (!o.as_corpus) {
    write_output(o.out, format_concept_table(pairs), out);
    return kSuccess;
  }
  std::vector<CorpusRecord> records;
  for (const auto& p : pairs) {
    records.push_back({p.positive_text, p.positive_text, std::nullopt});
    records.push_back({p.negative_text, p.negative_text, std::nullopt});
  }
  write_output(o.out, format_corpus(records), out);
  return kSuccess;
}

int cmd_gen_fixture(const FixtureOptions& o, const GlobalOptions& g, std::ostream& out) {
  const auto format = parse_format(o.format);
  PointCloud cloud;
  Vector direction;
  LabelMap labels;
  std::string model;
  if (o.kind == "circle") {
    cloud = fixtures::noisy_circle(o.n.value_or(1000), o.sigma.value_or(0.05), g.seed);
    direction = Vector{1.0, 0.0};
    model = "fixture-circle";
  } else if (o.kind == "blobs") {
    auto blobs = fixtures::two_blobs(o.n.value_or(200), o.dim.value_or(64), o.separation, o.sigma.value_or(1.0), g.seed);
    cloud = std::move(blobs.cloud);
    direction = blobs.direction;
    labels = std::move(blobs.labels);
    model = "fixture-blobs";
  } else {
    throw InvalidArgumentError("--kind must be 'circle' or 'blobs'");
  }
  if (o.out_embeddings.empty()) throw InvalidArgumentError("--out-embeddings is required");
  save_embeddings(o.out_embeddings, cloud, model, format);
  if (!o.out_direction.empty()) {
    FairnessDirection fd;
    fd.direction = direction;
    fd.raw_norm = 1.0;
    fd.normalize_concepts = false;
    write_file_atomic(o.out_direction, format_direction(fd));
  }
  if (!o.out_corpus.empty()) {
    std::vector<CorpusRecord> records;
    for (const auto& id : cloud.ids()) {
      std::optional<int> label;
      if (auto it = labels.find(id); it != labels.end()) label = it->second;
      records.push_back({id, "synthetic point " + id, label});
    }
    write_file_atomic(o.out_corpus, format_corpus(records));
  }
  out << "points: " << cloud.size() << "\n" << "dim: " << cloud.dim() << "\n";
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mapper graphs of embedding point clouds along a fairness direction", "fairmap"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Seed for gen-fixture")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (integer or 'auto')")->capture_default_str();
  app.add_flag("--verbose", g.verbose, "Extra diagnostics on stderr");

  EmbedOptions eo;
  auto* embed = app.add_subcommand("embed", "Embed a corpus through an embeddings endpoint, with caching");
  embed->add_option("--corpus", eo.corpus, "Corpus file (JSON lines)")->required();
  embed->add_option("--endpoint", eo.endpoint, "Base URL, e.g. http://host:port/v1");
  embed->add_option("--model", eo.model, "Embedding model name")->required();
  embed->add_option("--cache", eo.cache, "Cache directory")->required();
  embed->add_option("--out", eo.out, "Output embedding file")->required();
  embed->add_option("--format", eo.format, "binary|text")->capture_default_str();
  embed->add_option("--token-env", eo.token_env, "Environment variable holding the bearer token")->capture_default_str();
  embed->add_option("--batch-size", eo.batch_size)->capture_default_str();
  embed->add_option("--max-concurrent", eo.max_concurrent)->capture_default_str();
  embed->add_option("--max-attempts", eo.max_attempts)->capture_default_str();
  embed->add_option("--backoff-ms", eo.backoff_ms)->capture_default_str();

  DirectionOptions dopt;
  auto* direction = app.add_subcommand("direction", "Build the fairness direction from concept embeddings");
  direction->add_option("--embeddings", dopt.embeddings, "Embedding file holding the concept sentences")->required();
  auto* concepts_opt = direction->add_option("--concepts", dopt.concepts, "Concept table file (JSON lines)");
  auto* builtin_opt = direction->add_flag("--builtin", dopt.builtin, "Use the built-in concept table (default)");
  concepts_opt->excludes(builtin_opt);
  direction->add_flag("--corrected", dopt.corrected, "Built-in table with 'responsible' spelled correctly");
  direction->add_option("--normalize-concepts", dopt.normalize_concepts, "Unit-normalize concept vectors first")
      ->capture_default_str();
  direction->add_option("--out", dopt.out, "Output direction file")->required();

  MapOptions mo;
  auto* map = app.add_subcommand("map", "Build the Mapper graph");
  map->add_option("--embeddings", mo.embeddings)->required();
  auto* direction_opt = map->add_option("--direction", mo.direction, "Direction file; the lens is the cosine with it");
  map->add_option("--lens-axis", mo.lens_axis, "Use raw coordinate K as the lens instead of a direction")
      ->excludes(direction_opt);
  map->add_option("--intervals", mo.intervals, "Number of cover intervals")->capture_default_str();
  map->add_option("--overlap", mo.overlap, "Overlap fraction in [0, 0.95]")->capture_default_str();
  map->add_option("--clusterer", mo.clusterer, "single-linkage-gap|dbscan")->capture_default_str();
  map->add_option("--bins", mo.bins, "Histogram bins for single-linkage-gap")->capture_default_str();
  map->add_option("--eps", mo.eps, "DBSCAN radius")->capture_default_str();
  map->add_option("--min-pts", mo.min_pts, "DBSCAN core threshold")->capture_default_str();
  map->add_option("--metric", mo.metric, "euclidean|cosine-distance")->capture_default_str();
  map->add_flag("--no-normalize", mo.no_normalize, "Cluster raw embeddings instead of unit-normalized ones");
  map->add_option("--max-dim", mo.max_dim, "Highest simplex dimension (1-3)")->capture_default_str();
  map->add_option("--out", mo.out, "Output graph file")->required();

  AnalyzeOptions ao;
  auto* analyze = app.add_subcommand("analyze", "Report components, Betti numbers and label purity");
  analyze->add_option("--graph", ao.graph)->required();
  analyze->add_option("--corpus", ao.corpus, "Corpus file supplying labels");
  analyze->add_option("--out", ao.out, "Write the report here instead of stdout");

  RenderOptions ro;
  auto* render = app.add_subcommand("render", "Render a graph file to DOT or HTML");
  render->add_option("--graph", ro.graph)->required();
  render->add_option("--format", ro.format, "dot|html")->capture_default_str();
  render->add_option("--colormap", ro.colormap, "default (observed range) | pinned ([-1, 1])")->capture_default_str();
  render->add_option("--out", ro.out, "Output file (stdout if omitted)");

  ConceptsOptions co;
  auto* concepts = app.add_subcommand("concepts", "Print the built-in concept table");
  concepts->add_flag("--corrected", co.corrected);
  concepts->add_flag("--as-corpus", co.as_corpus, "Emit a corpus whose ids are the sentence texts");
  concepts->add_option("--out", co.out);

  FixtureOptions fo;
  auto* fixture = app.add_subcommand("gen-fixture", "Generate a synthetic circle or two-blob dataset");
  fixture->add_option("--kind", fo.kind, "circle|blobs")->capture_default_str();
  fixture->add_option("--n", fo.n, "Points (circle) or points per blob");
  fixture->add_option("--dim", fo.dim, "Ambient dimension (blobs)");
  fixture->add_option("--sigma", fo.sigma, "Noise standard deviation");
  fixture->add_option("--separation", fo.separation, "Blob centers at +/- separation * sigma")->capture_default_str();
  fixture->add_option("--out-embeddings", fo.out_embeddings)->required();
  fixture->add_option("--out-corpus", fo.out_corpus);
  fixture->add_option("--out-direction", fo.out_direction);
  fixture->add_option("--format", fo.format, "text|binary")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    g.thread_count();
    if (*embed) return cmd_embed(eo, g, out, err);
    if (*direction) return cmd_direction(dopt, out);
    if (*map) return cmd_map(mo, g, out, err);
    if (*analyze) return cmd_analyze(ao, out, err);
    if (*render) return cmd_render(ro, out);
    if (*concepts) return cmd_concepts(co, out);
    if (*fixture) return cmd_gen_fixture(fo, g, out);
  } catch (const EndpointError& e) {
    err << "error: " << e.what() << "\n";
    return kNetworkError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kInternalError;
  } catch (const DegenerateDirectionError& e) {
    err << "error: degenerate direction: " << e.what() << "\n";
    return kInputError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInputError;
}

}  // namespace fairmap::cli
