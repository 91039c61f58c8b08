#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairmap/vectorspace.hpp"

namespace fairmap {

enum class ClusterMethod { kSingleLinkageGap, kDbscan };
enum class Metric { kEuclidean, kCosineDistance };

std::string_view to_string(ClusterMethod m) noexcept;
std::string_view to_string(Metric m) noexcept;
// Throw InvalidArgumentError on unknown names.
ClusterMethod parse_cluster_method(std::string_view name);
Metric parse_metric(std::string_view name);

struct ClusterParams {
  ClusterMethod method = ClusterMethod::kSingleLinkageGap;
  std::size_t num_bins = 10;  // single-linkage-gap histogram bins
  double eps = 0.5;           // dbscan radius, inclusive
  std::size_t min_pts = 5;    // dbscan core threshold, counting the point itself
  Metric metric = Metric::kEuclidean;
  bool normalize = true;  // unit-normalize embeddings before measuring distances

  void validate() const;
};

struct Cluster {
  std::vector<std::string> members;  // ascending, nonempty

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

// Partitions `member_ids` (order and duplicates are irrelevant). DBSCAN noise
// points come back as singletons. Clusters are ordered by smallest member.
// Throws UnknownRecordError.
std::vector<Cluster> cluster_preimage(const PointCloud& cloud, std::span<const std::string> member_ids,
                                      const ClusterParams& params);

// The n-1 single-linkage merge heights (minimum spanning tree edge weights),
// ascending. Distances are measured on `cloud` as given. Throws
// EmptyInputError for fewer than two members.
std::vector<double> single_linkage_merge_distances(const PointCloud& cloud,
                                                   std::span<const std::string> member_ids,
                                                   Metric metric);

// Histogram the distances over [0, max] with `num_bins` bins of width max/num_bins
// (bin b is [b w, (b+1) w); the maximum falls in the last bin). Returns the
// left edge of the first empty bin above the first occupied bin, or nullopt
// when the occupied bins are contiguous. Merges at distance <= threshold join.
std::optional<double> gap_threshold(std::span<const double> merge_distances, std::size_t num_bins);

// Distance between two rows under `metric`, matching what the clusterers use.
double metric_distance(std::span<const double> a, std::span<const double> b, Metric metric);

// Index-level clusterer used by the pipeline. `rows` index into `prepared`,
// which must already be normalized when params.normalize is set. Returns
// ascending row-index groups ordered by smallest member.
std::vector<std::vector<std::size_t>> cluster_rows(const PointCloud& prepared,
                                                   std::span<const std::size_t> rows,
                                                   const ClusterParams& params);

}  // namespace fairmap
