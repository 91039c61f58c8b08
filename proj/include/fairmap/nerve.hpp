#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairmap/clustering.hpp"
#include "fairmap/vectorspace.hpp"

namespace fairmap {

struct LabelStats {
  std::size_t positive = 0;   // +1, fair
  std::size_t negative = 0;   // -1, unfair
  std::size_t unlabeled = 0;

  // Sign of (positive - negative); 0 for ties and for nodes without labels.
  int majority() const noexcept {
    return positive > negative ? 1 : (negative > positive ? -1 : 0);
  }
  bool mixed() const noexcept { return positive > 0 && negative > 0; }
};

struct MapperNode {
  std::size_t node_id = 0;
  std::size_t interval_index = 0;
  std::size_t cluster_index = 0;
  std::vector<std::string> members;  // ascending
  double mean_lens = 0.0;
  std::optional<LabelStats> label_stats;

  std::size_t size() const noexcept { return members.size(); }
};

struct Simplex {
  std::vector<std::size_t> vertices;  // ascending node ids
  std::size_t weight = 0;             // size of the common member intersection

  friend bool operator==(const Simplex&, const Simplex&) = default;
};

struct SimplicialComplex {
  std::vector<MapperNode> nodes;
  // simplices[k - 1] holds the k-simplices for k = 1..max_dim, sorted
  // lexicographically.
  std::vector<std::vector<Simplex>> simplices;
  std::size_t max_dim = 1;

  const std::vector<Simplex>& edges() const;
  std::size_t edge_count() const noexcept { return simplices.empty() ? 0 : simplices.front().size(); }
};

inline constexpr std::size_t kMaxNerveDim = 3;

// Vertices are all clusters in (interval, cluster) order; a k-simplex is
// recorded for every k+1 vertices whose member sets share at least one record.
// Throws InvalidArgumentError unless 1 <= max_dim <= 3.
SimplicialComplex build_nerve(const std::vector<std::vector<Cluster>>& per_interval_clusters,
                              std::size_t max_dim, std::size_t threads = 1);

// Same construction over integer point indices; `ids[i]` names point i.
SimplicialComplex build_nerve_indexed(const std::vector<std::vector<std::vector<std::size_t>>>& clusters,
                                      std::span<const std::string> ids, std::size_t max_dim,
                                      std::size_t threads = 1);

// Sets each node's mean_lens to the mean of its members' lens values.
void attach_mean_lens(SimplicialComplex& complex, const LensValues& lens);

// Components of the 1-skeleton; ids ascending, components by smallest id.
std::vector<std::vector<std::size_t>> connected_components(const SimplicialComplex& complex);

struct BettiNumbers {
  std::size_t betti0 = 0;
  std::size_t betti1 = 0;

  friend bool operator==(const BettiNumbers&, const BettiNumbers&) = default;
};

// b0 = components, b1 = E - V + b0 (cycle rank of the 1-skeleton).
BettiNumbers betti_numbers_1skeleton(const SimplicialComplex& complex);

using LabelMap = std::map<std::string, int, std::less<>>;

struct SeparationReport {
  std::size_t component_count = 0;
  std::vector<std::vector<std::size_t>> components;
  // nullopt when the component has no labeled members.
  std::vector<std::optional<double>> per_component_purity;
  std::size_t cross_edges = 0;
  std::vector<std::size_t> shared_nodes;
  std::size_t betti0 = 0;
  std::size_t betti1 = 0;
  std::vector<LabelStats> node_labels;  // indexed by node id
  std::size_t labeled_memberships = 0;
};

// Labels must be +1 or -1; records absent from `labels` are unlabeled.
SeparationReport separation_report(const SimplicialComplex& complex, const LabelMap& labels);

}  // namespace fairmap
