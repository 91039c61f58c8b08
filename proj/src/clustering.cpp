#include "fairmap/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairmap/errors.hpp"
#include "union_find.hpp"

namespace fairmap {
namespace {

// Member rows gathered into one contiguous block.
struct LocalBlock {
  std::vector<double> data;
  std::vector<double> sqnorms;  // filled for the cosine metric
  std::size_t rows = 0;
  std::size_t dim = 0;

  kernels::RowBlock block() const noexcept { return {data.data(), rows, dim}; }
  const double* row(std::size_t i) const noexcept { return data.data() + i * dim; }
};

LocalBlock gather(const PointCloud& cloud, std::span<const std::size_t> rows, Metric metric) {
  LocalBlock b;
  b.rows = rows.size();
  b.dim = cloud.dim();
  b.data.reserve(b.rows * b.dim);
  for (std::size_t r : rows) {
    const auto src = cloud.row(r);
    b.data.insert(b.data.end(), src.begin(), src.end());
  }
  if (metric == Metric::kCosineDistance) {
    b.sqnorms.resize(b.rows);
    kernels::active().row_sqnorms(b.block(), b.sqnorms.data());
    for (std::size_t i = 0; i < b.rows; ++i) {
      if (b.sqnorms[i] == 0.0) {
        throw DegenerateVectorError("record '" + cloud.id(rows[i]) + "' is a zero vector");
      }
    }
  }
  return b;
}

// Distances from local row `from` to every local row.
void distances_from(const LocalBlock& b, std::size_t from, Metric metric, std::vector<double>& out) {
  out.resize(b.rows);
  const auto& k = kernels::active();
  if (metric == Metric::kEuclidean) {
    k.row_sqdists(b.block(), b.row(from), out.data());
    for (double& d : out) d = std::sqrt(d);
  } else {
    k.row_dots(b.block(), b.row(from), out.data());
    for (std::size_t j = 0; j < b.rows; ++j) {
      out[j] = 1.0 - cosine_from_parts(out[j], b.sqnorms[j], b.sqnorms[from]);
    }
  }
}

struct TreeEdge {
  std::size_t a;
  std::size_t b;
  double weight;
};

// Prim's algorithm on the complete distance graph.
std::vector<TreeEdge> minimum_spanning_tree(const LocalBlock& b, Metric metric) {
  std::vector<TreeEdge> edges;
  if (b.rows < 2) return edges;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<bool> in_tree(b.rows, false);
  std::vector<double> best(b.rows, kInf);
  std::vector<std::size_t> parent(b.rows, 0);
  std::vector<double> dist;
  std::size_t current = 0;
  in_tree[0] = true;
  edges.reserve(b.rows - 1);
  for (std::size_t step = 1; step < b.rows; ++step) {
    distances_from(b, current, metric, dist);
    std::size_t next = b.rows;
    double next_w = kInf;
    for (std::size_t j = 0; j < b.rows; ++j) {
      if (in_tree[j]) continue;
      if (dist[j] < best[j]) {
        best[j] = dist[j];
        parent[j] = current;
      }
      if (next == b.rows || best[j] < next_w) {
        next = j;
        next_w = best[j];
      }
    }
    in_tree[next] = true;
    edges.push_back({parent[next], next, best[next]});
    current = next;
  }
  return edges;
}

std::vector<std::vector<std::size_t>> groups_from(UnionFind& uf, std::span<const std::size_t> rows) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> slot(rows.size(), std::numeric_limits<std::size_t>::max());
  // rows are ascending, so scanning in order yields groups sorted internally
  // and ordered by smallest member.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t root = uf.find(i);
    if (slot[root] == std::numeric_limits<std::size_t>::max()) {
      slot[root] = groups.size();
      groups.emplace_back();
    }
    groups[slot[root]].push_back(rows[i]);
  }
  return groups;
}

std::vector<std::vector<std::size_t>> single_linkage_gap(const LocalBlock& b,
                                                         std::span<const std::size_t> rows,
                                                         const ClusterParams& params) {
  const auto tree = minimum_spanning_tree(b, params.metric);
  std::vector<double> heights(tree.size());
  std::transform(tree.begin(), tree.end(), heights.begin(), [](const TreeEdge& e) { return e.weight; });
  std::sort(heights.begin(), heights.end());
  const auto threshold = gap_threshold(heights, params.num_bins);
  UnionFind uf(rows.size());
  for (const auto& e : tree) {
    if (!threshold || e.weight <= *threshold) uf.unite(e.a, e.b);
  }
  return groups_from(uf, rows);
}

std::vector<std::vector<std::size_t>> dbscan(const LocalBlock& b, std::span<const std::size_t> rows,
                                             const ClusterParams& params) {
  const std::size_t m = b.rows;
  std::vector<std::vector<std::size_t>> neighbors(m);
  std::vector<double> dist;
  for (std::size_t i = 0; i < m; ++i) {
    distances_from(b, i, params.metric, dist);
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i || dist[j] <= params.eps) neighbors[i].push_back(j);
    }
  }
  std::vector<bool> core(m);
  for (std::size_t i = 0; i < m; ++i) core[i] = neighbors[i].size() >= params.min_pts;

  UnionFind uf(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!core[i]) continue;
    for (std::size_t j : neighbors[i]) {
      if (core[j]) uf.unite(i, j);
    }
  }
  // A border point joins the cluster of its lowest-index core neighbor.
  for (std::size_t i = 0; i < m; ++i) {
    if (core[i]) continue;
    for (std::size_t j : neighbors[i]) {
      if (core[j]) {
        uf.unite(i, j);
        break;
      }
    }
  }
  return groups_from(uf, rows);
}

std::vector<std::size_t> canonical_rows(const PointCloud& cloud, std::span<const std::string> ids) {
  std::vector<std::size_t> rows;
  rows.reserve(ids.size());
  for (const auto& id : ids) {
    const auto idx = cloud.index_of(id);
    if (!idx) throw UnknownRecordError("unknown record id '" + id + "'");
    rows.push_back(*idx);
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

}  // namespace

std::string_view to_string(ClusterMethod m) noexcept {
  return m == ClusterMethod::kDbscan ? "dbscan" : "single-linkage-gap";
}

std::string_view to_string(Metric m) noexcept {
  return m == Metric::kCosineDistance ? "cosine-distance" : "euclidean";
}

ClusterMethod parse_cluster_method(std::string_view name) {
  if (name == "single-linkage-gap") return ClusterMethod::kSingleLinkageGap;
  if (name == "dbscan") return ClusterMethod::kDbscan;
  throw InvalidArgumentError("unknown clusterer '" + std::string(name) + "'");
}

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::kEuclidean;
  if (name == "cosine-distance") return Metric::kCosineDistance;
  throw InvalidArgumentError("unknown metric '" + std::string(name) + "'");
}

void ClusterParams::validate() const {
  if (num_bins < 1) throw InvalidArgumentError("single-linkage-gap needs at least one histogram bin");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgumentError("dbscan eps must be positive");
  if (min_pts < 1) throw InvalidArgumentError("dbscan min_pts must be at least 1");
}

std::optional<double> gap_threshold(std::span<const double> merge_distances, std::size_t num_bins) {
  if (merge_distances.empty() || num_bins < 1) return std::nullopt;
  const double top = *std::max_element(merge_distances.begin(), merge_distances.end());
  if (!(top > 0.0)) return std::nullopt;
  const double width = top / static_cast<double>(num_bins);
  std::vector<std::size_t> counts(num_bins, 0);
  for (double d : merge_distances) {
    auto bin = static_cast<std::size_t>(std::floor(d / width));
    counts[std::min(bin, num_bins - 1)]++;
  }
  const auto first_occupied =
      static_cast<std::size_t>(std::find_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) -
                               counts.begin());
  for (std::size_t bin = first_occupied + 1; bin < num_bins; ++bin) {
    if (counts[bin] == 0) return static_cast<double>(bin) * width;
  }
  return std::nullopt;
}

double metric_distance(std::span<const double> a, std::span<const double> b, Metric metric) {
  if (a.size() != b.size()) throw DimensionError("dimension mismatch in distance");
  if (metric == Metric::kEuclidean) return std::sqrt(kernels::squared_distance(a, b));
  return 1.0 - cosine_similarity(a, b);
}

std::vector<std::vector<std::size_t>> cluster_rows(const PointCloud& prepared,
                                                   std::span<const std::size_t> rows,
                                                   const ClusterParams& params) {
  params.validate();
  if (rows.empty()) return {};
  if (rows.size() == 1) return {{rows.front()}};
  const LocalBlock b = gather(prepared, rows, params.metric);
  if (params.method == ClusterMethod::kDbscan) return dbscan(b, rows, params);
  return single_linkage_gap(b, rows, params);
}

std::vector<Cluster> cluster_preimage(const PointCloud& cloud, std::span<const std::string> member_ids,
                                      const ClusterParams& params) {
  params.validate();
  const auto rows = canonical_rows(cloud, member_ids);
  std::vector<std::vector<std::size_t>> groups;
  if (params.normalize && rows.size() > 1) {
    std::vector<std::pair<std::string, Vector>> subset;
    subset.reserve(rows.size());
    for (std::size_t r : rows) subset.emplace_back(cloud.id(r), cloud.vector(r));
    const PointCloud sub = normalized_rows(PointCloud::from_records(cloud.dim(), std::move(subset)));
    std::vector<std::size_t> local(rows.size());
    std::iota(local.begin(), local.end(), 0);
    groups = cluster_rows(sub, local, params);
    for (auto& g : groups) {
      for (auto& r : g) r = rows[r];
    }
  } else {
    groups = cluster_rows(cloud, rows, params);
  }
  std::vector<Cluster> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    Cluster c;
    c.members.reserve(g.size());
    for (std::size_t r : g) c.members.push_back(cloud.id(r));
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<double> single_linkage_merge_distances(const PointCloud& cloud,
                                                   std::span<const std::string> member_ids,
                                                   Metric metric) {
  const auto rows = canonical_rows(cloud, member_ids);
  if (rows.size() < 2) throw EmptyInputError("merge distances need at least two members");
  const auto tree = minimum_spanning_tree(gather(cloud, rows, metric), metric);
  std::vector<double> heights(tree.size());
  std::transform(tree.begin(), tree.end(), heights.begin(), [](const TreeEdge& e) { return e.weight; });
  std::sort(heights.begin(), heights.end());
  return heights;
}

}  // namespace fairmap
